#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;

use seiguard_core::{SpaceConfig, Storage};
use seiguard_server::{RegisterRequest, SeiGuard, SpaceConfigs, Spaces, UserDb};

pub fn spaces_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/spaces")
}

/// Shipped name corpora with narrower phone/ID/email spaces.
pub fn small_configs() -> SpaceConfigs {
    let dir = spaces_dir();
    let p = |t: &str| SpaceConfig::parse(t, &dir).unwrap();
    SpaceConfigs {
        phone: p("space=phone\nprefix=136511,5\n"),
        id_number: p("space=id\nkind=idnum\nregion=140122\nregion=110108\nbirth_from=1998-01-01\nbirth_to=1998-01-10\nf_unit=4000\n"),
        email: p("space=email\nkind=email\nhoney_synthetic=2000\nbootstrap=1000\n"),
        firstname: SpaceConfig::load(dir.join("firstname.cfg")).unwrap(),
        lastname: SpaceConfig::load(dir.join("lastname.cfg")).unwrap(),
    }
}

pub fn service(storage: Arc<dyn Storage>, db: UserDb) -> SeiGuard {
    SeiGuard::new(Spaces::open_or_build(&small_configs(), storage).unwrap(), db).unwrap()
}

pub fn wzg018(password: &str) -> RegisterRequest {
    RegisterRequest {
        username: "wzg018".into(),
        password: password.into(),
        phone: "13651160987".into(),
        id_number: "140122199801070048".into(),
        email: "wangzuoguang16@mails.ucas.ac.cn".into(),
        lastname: "王".into(),
        firstname: "作广".into(),
    }
}
