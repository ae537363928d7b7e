//! Conventional password-checking server: bcrypt hash plus plaintext fields.

use std::path::Path;
use std::sync::Mutex;

use rusqlite::{params, Connection, OptionalExtension};

use crate::error::{Result, ServiceError};
use crate::service::{LoginResponse, RegisterRequest};
use crate::timing::Timings;

const SCHEMA: &str = "
CREATE TABLE IF NOT EXISTS pbe_users (
    username      TEXT PRIMARY KEY NOT NULL,
    password_hash TEXT NOT NULL,
    phone         TEXT NOT NULL,
    id_number     TEXT NOT NULL,
    email         TEXT NOT NULL,
    lastname      TEXT NOT NULL,
    firstname     TEXT NOT NULL
);
";

#[derive(Debug)]
pub struct Baseline {
    conn: Mutex<Connection>,
    cost: u32,
}

struct Row {
    hash: String,
    resp: LoginResponse,
}

impl Baseline {
    pub fn open(path: impl AsRef<Path>, cost: u32) -> Result<Self> {
        let conn = Connection::open(path)?;
        conn.pragma_update(None, "journal_mode", "WAL")?;
        Self::init(conn, cost)
    }

    pub fn open_in_memory(cost: u32) -> Result<Self> {
        Self::init(Connection::open_in_memory()?, cost)
    }

    fn init(conn: Connection, cost: u32) -> Result<Self> {
        conn.execute_batch(SCHEMA)?;
        Ok(Baseline { conn: Mutex::new(conn), cost })
    }

    pub fn cost(&self) -> u32 {
        self.cost
    }

    pub fn register(&self, req: &RegisterRequest) -> Result<Timings> {
        let mut t = Timings::start();
        if req.username.is_empty() || req.password.is_empty() {
            return Err(ServiceError::Invalid("username and password must not be empty".into()));
        }
        if t.time("fetch", || self.fetch(&req.username))?.is_some() {
            return Err(ServiceError::UsernameTaken);
        }
        let hash = t.time("hash", || bcrypt::hash(&req.password, self.cost))?;
        let inserted = t.time("db", || -> Result<bool> {
            let conn = self.conn.lock().unwrap();
            Ok(conn.execute(
                "INSERT OR IGNORE INTO pbe_users (username, password_hash, phone, id_number, email, lastname, firstname)
                 VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7)",
                params![req.username, hash, req.phone, req.id_number, req.email, req.lastname, req.firstname],
            )? == 1)
        })?;
        if !inserted {
            return Err(ServiceError::UsernameTaken);
        }
        Ok(t)
    }

    fn fetch(&self, username: &str) -> Result<Option<Row>> {
        let conn = self.conn.lock().unwrap();
        Ok(conn
            .query_row(
                "SELECT password_hash, phone, id_number, email, lastname, firstname FROM pbe_users WHERE username = ?1",
                [username],
                |r| {
                    Ok(Row {
                        hash: r.get(0)?,
                        resp: LoginResponse {
                            username: username.to_owned(),
                            phone: r.get(1)?,
                            id_number: r.get(2)?,
                            email: r.get(3)?,
                            name: r.get::<_, String>(4)? + &r.get::<_, String>(5)?,
                        },
                    })
                },
            )
            .optional()?)
    }

    pub fn login(&self, username: &str, password: &str) -> Result<(LoginResponse, Timings)> {
        let mut t = Timings::start();
        let row = t.time("fetch", || self.fetch(username))?.ok_or(ServiceError::BadCredentials)?;
        if !t.time("hash", || bcrypt::verify(password, &row.hash))? {
            return Err(ServiceError::BadCredentials);
        }
        Ok((row.resp, t))
    }
}
