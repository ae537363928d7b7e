mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use reqwest::blocking::Client;
use reqwest::StatusCode;
use seiguard_core::MemStorage;
use seiguard_server::{parse_timing_header, router, BackgroundServer, Baseline, UserDb, PATH_HEADER, TIMING_HEADER};
use serde_json::{json, Value};

use common::{service, wzg018};

fn seiguard_server(timing: bool) -> BackgroundServer {
    let svc = service(Arc::new(MemStorage::new()), UserDb::open_in_memory().unwrap());
    BackgroundServer::spawn(router(Arc::new(svc), timing)).unwrap()
}

fn keys(v: &Value) -> BTreeSet<String> {
    v.as_object().unwrap().keys().cloned().collect()
}

#[test]
fn register_and_login_over_http() {
    let srv = seiguard_server(true);
    let c = Client::new();
    let url = |p: &str| format!("{}{p}", srv.url());

    assert_eq!(c.get(url("/healthz")).send().unwrap().status(), StatusCode::OK);

    let r = c.post(url("/register")).json(&wzg018("s3cret")).send().unwrap();
    assert_eq!(r.status(), StatusCode::OK);
    assert!(r.headers().contains_key(TIMING_HEADER));
    assert_eq!(r.json::<Value>().unwrap(), json!({ "ok": true }));

    let r = c.post(url("/register")).json(&wzg018("other")).send().unwrap();
    assert_eq!(r.status(), StatusCode::CONFLICT);
    assert_eq!(r.json::<Value>().unwrap(), json!({ "error": "the username has existed" }));

    let mut bad = wzg018("x");
    bad.username = "someone".into();
    bad.id_number = "14012219980107004X".into();
    let r = c.post(url("/register")).json(&bad).send().unwrap();
    assert_eq!(r.status(), StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(r.json::<Value>().unwrap(), json!({ "error": "the ID N.O. is not valid" }));

    let r = c.post(url("/register")).json(&json!({ "username": "half" })).send().unwrap();
    assert_eq!(r.status(), StatusCode::UNPROCESSABLE_ENTITY);
    assert!(r.json::<Value>().unwrap()["error"].is_string());

    let good = c.post(url("/login")).json(&json!({ "username": "wzg018", "password": "s3cret" })).send().unwrap();
    assert_eq!(good.status(), StatusCode::OK);
    let good_path = good.headers()[PATH_HEADER].to_str().unwrap().to_owned();
    let timing = parse_timing_header(good.headers()[TIMING_HEADER].to_str().unwrap());
    assert!(timing.iter().any(|(k, _)| k == "phone"));
    let good: Value = good.json().unwrap();
    assert_eq!(good["name"], "王作广");
    assert_eq!(good["id_number"], "140122199801070048");

    let wrong = c.post(url("/login")).json(&json!({ "username": "wzg018", "password": "guess" })).send().unwrap();
    assert_eq!(wrong.status(), StatusCode::OK);
    assert_eq!(wrong.headers()[PATH_HEADER].to_str().unwrap(), good_path);
    let wrong: Value = wrong.json().unwrap();
    assert_eq!(keys(&good), keys(&wrong));
    assert_ne!(good["phone"], wrong["phone"]);

    let r = c.post(url("/login")).json(&json!({ "username": "ghost", "password": "s3cret" })).send().unwrap();
    assert_eq!(r.status(), StatusCode::UNAUTHORIZED);
    assert_eq!(r.json::<Value>().unwrap(), json!({ "error": "the username or password is wrong" }));
}

#[test]
fn timing_header_is_opt_in() {
    let srv = seiguard_server(false);
    let c = Client::new();
    c.post(format!("{}/register", srv.url())).json(&wzg018("pw")).send().unwrap();
    let r = c
        .post(format!("{}/login", srv.url()))
        .json(&json!({ "username": "wzg018", "password": "pw" }))
        .send()
        .unwrap();
    assert!(!r.headers().contains_key(TIMING_HEADER));
    assert!(r.headers().contains_key(PATH_HEADER));
}

#[test]
fn baseline_exposes_the_password_oracle() {
    let srv = BackgroundServer::spawn(router(Arc::new(Baseline::open_in_memory(4).unwrap()), true)).unwrap();
    let c = Client::new();
    let url = |p: &str| format!("{}{p}", srv.url());
    assert_eq!(c.post(url("/register")).json(&wzg018("s3cret")).send().unwrap().status(), StatusCode::OK);
    assert_eq!(c.post(url("/register")).json(&wzg018("s3cret")).send().unwrap().status(), StatusCode::CONFLICT);

    let good = c.post(url("/login")).json(&json!({ "username": "wzg018", "password": "s3cret" })).send().unwrap();
    assert_eq!(good.status(), StatusCode::OK);
    let timing = parse_timing_header(good.headers()[TIMING_HEADER].to_str().unwrap());
    assert!(timing.iter().any(|(k, _)| k == "hash"));
    assert_eq!(good.json::<Value>().unwrap()["phone"], "13651160987");

    for user in ["wzg018", "ghost"] {
        let r = c.post(url("/login")).json(&json!({ "username": user, "password": "guess" })).send().unwrap();
        assert_eq!(r.status(), StatusCode::UNAUTHORIZED);
        assert_eq!(
            r.json::<Value>().unwrap(),
            json!({ "error": "the username or password is wrong", "authenticated": false })
        );
    }
}
