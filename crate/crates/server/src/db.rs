//! SQLite persistence for the honey-encryption service.
//!
//! `users` holds one row of five decimal ciphertexts per account and
//! `counters` the assigned seed totals of the growing spaces. A user row
//! and its counter updates commit in one transaction.

use std::path::Path;
use std::sync::Mutex;

use rusqlite::{params, Connection, OptionalExtension};
use seiguard_core::Ciphertext;

use crate::error::{Result, ServiceError};

const SCHEMA: &str = "
CREATE TABLE IF NOT EXISTS users (
    username TEXT PRIMARY KEY NOT NULL,
    c_phone  TEXT NOT NULL,
    c_id     TEXT NOT NULL,
    c_email  TEXT NOT NULL,
    c_fn     TEXT NOT NULL,
    c_ln     TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS counters (
    space TEXT PRIMARY KEY NOT NULL,
    num   TEXT NOT NULL
);
";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserRecord {
    pub username: String,
    pub phone: Ciphertext,
    pub id_number: Ciphertext,
    pub email: Ciphertext,
    pub firstname: Ciphertext,
    pub lastname: Ciphertext,
}

#[derive(Debug)]
pub struct UserDb {
    conn: Mutex<Connection>,
}

fn parse_ct(s: String) -> rusqlite::Result<Ciphertext> {
    s.parse()
        .map_err(|_| rusqlite::Error::FromSqlConversionFailure(0, rusqlite::types::Type::Text, "bad ciphertext".into()))
}

fn read_counter(tx: &Connection, space: &str) -> Result<Option<u128>> {
    let v: Option<String> = tx
        .query_row("SELECT num FROM counters WHERE space = ?1", [space], |r| r.get(0))
        .optional()?;
    v.map(|s| s.parse().map_err(|_| ServiceError::Config(format!("counter {space} holds {s:?}"))))
        .transpose()
}

fn write_counter(tx: &Connection, space: &str, num: u128) -> Result<()> {
    tx.execute(
        "INSERT INTO counters (space, num) VALUES (?1, ?2) ON CONFLICT(space) DO UPDATE SET num = excluded.num",
        params![space, num.to_string()],
    )?;
    Ok(())
}

impl UserDb {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let conn = Connection::open(path)?;
        conn.pragma_update(None, "journal_mode", "WAL")?;
        conn.pragma_update(None, "synchronous", "NORMAL")?;
        Self::init(conn)
    }

    pub fn open_in_memory() -> Result<Self> {
        Self::init(Connection::open_in_memory()?)
    }

    fn init(conn: Connection) -> Result<Self> {
        conn.execute_batch(SCHEMA)?;
        Ok(UserDb { conn: Mutex::new(conn) })
    }

    pub fn exists(&self, username: &str) -> Result<bool> {
        let conn = self.conn.lock().unwrap();
        Ok(conn
            .query_row("SELECT 1 FROM users WHERE username = ?1", [username], |_| Ok(()))
            .optional()?
            .is_some())
    }

    /// Inserts `rec` and raises each counter to at least the given value.
    /// Returns `false` if the username is taken.
    pub fn insert(&self, rec: &UserRecord, counters: &[(&str, u128)]) -> Result<bool> {
        let mut conn = self.conn.lock().unwrap();
        let tx = conn.transaction()?;
        let n = tx.execute(
            "INSERT OR IGNORE INTO users (username, c_phone, c_id, c_email, c_fn, c_ln) VALUES (?1, ?2, ?3, ?4, ?5, ?6)",
            params![
                rec.username,
                rec.phone.to_string(),
                rec.id_number.to_string(),
                rec.email.to_string(),
                rec.firstname.to_string(),
                rec.lastname.to_string()
            ],
        )?;
        if n == 0 {
            return Ok(false);
        }
        // Concurrent registrations may commit out of order; counters only grow.
        for &(space, num) in counters {
            if read_counter(&tx, space)?.is_none_or(|cur| cur < num) {
                write_counter(&tx, space, num)?;
            }
        }
        tx.commit()?;
        Ok(true)
    }

    pub fn get(&self, username: &str) -> Result<Option<UserRecord>> {
        let conn = self.conn.lock().unwrap();
        Ok(conn
            .query_row(
                "SELECT username, c_phone, c_id, c_email, c_fn, c_ln FROM users WHERE username = ?1",
                [username],
                |r| {
                    Ok(UserRecord {
                        username: r.get(0)?,
                        phone: parse_ct(r.get(1)?)?,
                        id_number: parse_ct(r.get(2)?)?,
                        email: parse_ct(r.get(3)?)?,
                        firstname: parse_ct(r.get(4)?)?,
                        lastname: parse_ct(r.get(5)?)?,
                    })
                },
            )
            .optional()?)
    }

    pub fn user_count(&self) -> Result<u64> {
        let conn = self.conn.lock().unwrap();
        Ok(conn.query_row("SELECT COUNT(*) FROM users", [], |r| r.get::<_, i64>(0))? as u64)
    }

    pub fn counter(&self, space: &str) -> Result<Option<u128>> {
        read_counter(&self.conn.lock().unwrap(), space)
    }

    /// Overwrites counters with the store totals, which are authoritative.
    pub fn reconcile(&self, totals: &[(&str, u128)]) -> Result<()> {
        let mut conn = self.conn.lock().unwrap();
        let tx = conn.transaction()?;
        for &(space, num) in totals {
            if read_counter(&tx, space)? != Some(num) {
                tracing::info!(space, num = %num, "reconciled seed counter");
                write_counter(&tx, space, num)?;
            }
        }
        tx.commit()?;
        Ok(())
    }

    /// `(table, columns)` for every table.
    pub fn schema(&self) -> Result<Vec<(String, Vec<String>)>> {
        let conn = self.conn.lock().unwrap();
        let tables: Vec<String> = conn
            .prepare("SELECT name FROM sqlite_master WHERE type = 'table' ORDER BY name")?
            .query_map([], |r| r.get(0))?
            .collect::<rusqlite::Result<_>>()?;
        let mut out = Vec::new();
        for t in tables {
            let cols = conn
                .prepare(&format!("PRAGMA table_info({t})"))?
                .query_map([], |r| r.get::<_, String>(1))?
                .collect::<rusqlite::Result<_>>()?;
            out.push((t, cols));
        }
        Ok(out)
    }

    /// Flushes the write-ahead log into the main database file.
    pub fn checkpoint(&self) -> Result<()> {
        let conn = self.conn.lock().unwrap();
        conn.query_row("PRAGMA wal_checkpoint(TRUNCATE)", [], |_| Ok(())).optional()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(name: &str) -> UserRecord {
        UserRecord {
            username: name.into(),
            phone: Ciphertext(1),
            id_number: Ciphertext(2),
            email: Ciphertext(u64::MAX),
            firstname: Ciphertext(4),
            lastname: Ciphertext(5),
        }
    }

    #[test]
    fn insert_get_and_duplicate() {
        let db = UserDb::open_in_memory().unwrap();
        assert!(db.insert(&rec("wzg018"), &[("email", 100)]).unwrap());
        assert!(!db.insert(&rec("wzg018"), &[("email", 200)]).unwrap());
        assert_eq!(db.get("wzg018").unwrap().unwrap(), rec("wzg018"));
        assert_eq!(db.counter("email").unwrap(), Some(100));
        assert!(db.get("nobody").unwrap().is_none());
        assert_eq!(db.user_count().unwrap(), 1);
    }

    #[test]
    fn counters_only_grow() {
        let db = UserDb::open_in_memory().unwrap();
        db.insert(&rec("a"), &[("email", 300)]).unwrap();
        db.insert(&rec("b"), &[("email", 200)]).unwrap();
        assert_eq!(db.counter("email").unwrap(), Some(300));
        db.reconcile(&[("email", 250), ("firstname", 1 << 64)]).unwrap();
        assert_eq!(db.counter("email").unwrap(), Some(250));
        assert_eq!(db.counter("firstname").unwrap(), Some(1 << 64));
    }

    #[test]
    fn schema_has_no_password_column() {
        let db = UserDb::open_in_memory().unwrap();
        for (_, cols) in db.schema().unwrap() {
            assert!(cols.iter().all(|c| !c.contains("pass") && !c.contains("hash") && !c.contains("key")));
        }
    }
}
