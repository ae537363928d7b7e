use seiguard_wasm_demo::Demo;

#[test]
fn right_password_restores_the_record() {
    let mut d = Demo::new().unwrap();
    assert!(d.login("x").unwrap().is_none());
    d.register("wzg018", "13651101234", "王", "伟").unwrap();
    let got = d.login("wzg018").unwrap().unwrap();
    assert_eq!(got.phone, "13651101234");
    assert_eq!(got.name, "王伟");
}

#[test]
fn wrong_passwords_give_plausible_records() {
    let mut d = Demo::new().unwrap();
    d.register("wzg018", "13651101234", "王", "伟").unwrap();
    for i in 0..200 {
        let got = d.login(&format!("guess{i}")).unwrap().unwrap();
        assert!(got.phone.starts_with("136511") && got.phone.len() == 11, "{}", got.phone);
        let chars = got.name.chars().count();
        assert!((2..=4).contains(&chars), "{}", got.name);
    }
}

#[test]
fn histogram_is_uniform() {
    let d = Demo::new().unwrap();
    let h = d.phone_histogram(20_000, 20).unwrap();
    assert_eq!(h.counts.iter().sum::<u64>(), 20_000);
    assert_eq!(h.dof, 19.0);
    assert!(h.p_value > 0.001, "p = {}", h.p_value);
}

#[test]
fn firstname_blocks() {
    let d = Demo::new().unwrap();
    let common = d.firstname_block("伟").unwrap();
    assert!(common.main_part);
    let size: u128 = common.size.parse().unwrap();
    assert!(size >= 1_000, "{size}");
    let rare = d.firstname_block("龘龘").unwrap();
    assert!(!rare.main_part);
    assert_eq!(rare.size, "10");
    assert!(d.firstname_block("").is_err());
}
