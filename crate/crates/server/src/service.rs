//! Registration and login for the honey-encryption service.
//!
//! Registration encodes each field in its space, XORs the seeds with the
//! password-derived key and stores only the ciphertexts. Login derives the
//! key from whatever password it receives and decodes unconditionally.

use std::sync::Arc;

use rand::rngs::OsRng;
use serde::{Deserialize, Serialize};
use seiguard_core::space::email::is_valid_email;
use seiguard_core::space::idnum::INVALID_ID;
use seiguard_core::space::{EmailSpace, Enumeration, IdNumberSpace, NamePart, NameSpace, UniformSpace};
use seiguard_core::{build_space, ChunkedMapStore, KeyDerivation, Md5Truncated, Seed, SpaceConfig, Storage};

use crate::config::SpaceConfigs;
use crate::db::{UserDb, UserRecord};
use crate::error::{Result, ServiceError};
use crate::timing::Timings;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterRequest {
    pub username: String,
    pub password: String,
    pub phone: String,
    pub id_number: String,
    pub email: String,
    pub lastname: String,
    pub firstname: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoginRequest {
    pub username: String,
    pub password: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoginResponse {
    pub username: String,
    pub phone: String,
    pub id_number: String,
    pub email: String,
    /// Lastname followed by firstname.
    pub name: String,
}

/// The five opened field spaces.
#[derive(Debug)]
pub struct Spaces {
    pub phone: UniformSpace<Arc<dyn Enumeration>>,
    pub phone_store: ChunkedMapStore,
    pub id_number: IdNumberSpace,
    pub id_store: ChunkedMapStore,
    pub email: EmailSpace,
    pub names: NameSpace,
}

fn ensure_built(cfg: &SpaceConfig, storage: &Arc<dyn Storage>) -> Result<()> {
    if storage.read(&ChunkedMapStore::index_file_name(&cfg.name))?.is_none() {
        let summary = build_space(cfg, storage.clone(), &mut OsRng)?;
        tracing::info!(%summary, "built mapping files");
    }
    Ok(())
}

impl Spaces {
    /// Opens every space in `storage`, building missing mapping files first.
    pub fn open_or_build(cfgs: &SpaceConfigs, storage: Arc<dyn Storage>) -> Result<Self> {
        for cfg in [&cfgs.phone, &cfgs.id_number, &cfgs.email, &cfgs.firstname, &cfgs.lastname] {
            ensure_built(cfg, &storage)?;
        }
        let phone = cfgs.phone.uniform_space()?;
        let phone_store = ChunkedMapStore::open(storage.clone(), &cfgs.phone.name)?;
        phone.check_store(&phone_store)?;
        let id_number = cfgs.id_number.id_space()?;
        let id_store = ChunkedMapStore::open(storage.clone(), &cfgs.id_number.name)?;
        id_number.bodies().check_store(&id_store)?;
        let email = EmailSpace::new(
            ChunkedMapStore::open(storage.clone(), &cfgs.email.name)?,
            cfgs.email.incremental_params()?,
            cfgs.email.honey_dataset(&mut OsRng)?,
        )?;
        let names = NameSpace {
            first: NamePart::open_firstname(storage.clone(), &cfgs.firstname.name)?,
            last: NamePart::open_lastname(storage, &cfgs.lastname.name)?,
        };
        Ok(Spaces { phone, phone_store, id_number, id_store, email, names })
    }

    /// `(space name, assigned total)` of the growing spaces.
    pub fn totals(&self) -> [(&str, u128); 3] {
        [
            (self.email.store().name(), self.email.seed_num()),
            (self.names.first.store().name(), self.names.first.seed_num()),
            (self.names.last.store().name(), self.names.last.seed_num()),
        ]
    }
}

pub struct SeiGuard {
    spaces: Spaces,
    db: UserDb,
    kdf: Box<dyn KeyDerivation>,
}

impl std::fmt::Debug for SeiGuard {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SeiGuard").field("spaces", &self.spaces).finish_non_exhaustive()
    }
}

impl SeiGuard {
    /// Wraps opened spaces and a database, reconciling the database
    /// counters with the stores.
    pub fn new(spaces: Spaces, db: UserDb) -> Result<Self> {
        db.reconcile(&spaces.totals())?;
        Ok(SeiGuard { spaces, db, kdf: Box::new(Md5Truncated) })
    }

    pub fn with_kdf(mut self, kdf: impl KeyDerivation + 'static) -> Self {
        self.kdf = Box::new(kdf);
        self
    }

    pub fn spaces(&self) -> &Spaces {
        &self.spaces
    }

    pub fn db(&self) -> &UserDb {
        &self.db
    }

    fn validate(&self, req: &RegisterRequest) -> Result<()> {
        let s = &self.spaces;
        if req.username.is_empty() {
            return Err(ServiceError::Invalid("the username must not be empty".into()));
        }
        if req.password.is_empty() {
            return Err(ServiceError::Invalid("the password must not be empty".into()));
        }
        if s.phone.rank_of(&req.phone).is_none() {
            return Err(ServiceError::Invalid("the phone number is not valid".into()));
        }
        if !s.id_number.validate(&req.id_number) {
            return Err(ServiceError::Invalid(INVALID_ID.into()));
        }
        if !is_valid_email(&req.email) {
            return Err(ServiceError::Invalid("the email address is not valid".into()));
        }
        s.names.first.validate(&req.firstname)?;
        s.names.last.validate(&req.lastname)?;
        Ok(())
    }

    pub fn register(&self, req: &RegisterRequest) -> Result<Timings> {
        let mut t = Timings::start();
        self.validate(req)?;
        if self.db.exists(&req.username)? {
            return Err(ServiceError::UsernameTaken);
        }
        let key = t.time("key", || self.kdf.derive(&req.password))?;
        let s = &self.spaces;
        let mut rng = OsRng;
        let phone = t.time("phone", || s.phone.encode(&req.phone, &mut rng))?;
        let id = t.time("id", || s.id_number.encode_body(&req.id_number, &mut rng))?;
        let email = t.time("email", || s.email.register_encode(&req.email, &mut rng))?;
        let (ln, ln_num) = t.time("lastname", || s.names.last.encode(&req.lastname, &mut rng))?;
        let (fname, fn_num) = t.time("firstname", || s.names.first.encode(&req.firstname, &mut rng))?;
        let rec = UserRecord {
            username: req.username.clone(),
            phone: key.encrypt(phone),
            id_number: key.encrypt(id),
            email: key.encrypt(email.seed),
            firstname: key.encrypt(fname),
            lastname: key.encrypt(ln),
        };
        let counters = [
            (s.email.store().name(), email.seed_num),
            (s.names.first.store().name(), fn_num),
            (s.names.last.store().name(), ln_num),
        ];
        // A lost race on the username leaves this registration's appended
        // lines in the stores as honey.
        if !t.time("db", || self.db.insert(&rec, &counters))? {
            return Err(ServiceError::UsernameTaken);
        }
        Ok(t)
    }

    /// Decrypts the stored fields under `password`. Only an unknown username
    /// fails.
    pub fn login(&self, username: &str, password: &str) -> Result<(LoginResponse, Timings)> {
        let mut t = Timings::start();
        let rec = t.time("fetch", || self.db.get(username))?.ok_or(ServiceError::BadCredentials)?;
        let key = t.time("key", || self.kdf.derive(password))?;
        let s = &self.spaces;
        let seed = |c| -> Seed { key.decrypt(c) };
        let phone = t.time("phone", || s.phone.decode(&s.phone_store, seed(rec.phone)))?;
        let id_number = t.time("id", || s.id_number.decode_full(Some(&s.id_store), seed(rec.id_number)))?;
        let email = t.time("email", || s.email.decode(seed(rec.email)))?;
        let lastname = t.time("lastname", || s.names.last.decode(seed(rec.lastname)))?;
        let firstname = t.time("firstname", || s.names.first.decode(seed(rec.firstname)))?;
        Ok((LoginResponse { username: rec.username, phone, id_number, email, name: lastname + &firstname }, t))
    }
}
