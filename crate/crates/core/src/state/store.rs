//! SQLite-backed encoding.
//!
//! The state lives in one of two identical tables `amp_0` / `amp_1`. A gate
//! that reshapes the key set clears the idle table, fills it with one
//! `INSERT ... SELECT` from the live table, and flips which one is live; all
//! inside a single transaction. Gates that keep the key set (phase flips,
//! scaling, deletion) run as an in-place `UPDATE` / `DELETE`.
//!
//! Keys are the basis index reinterpreted as a signed 64-bit integer, so
//! qubit 63 maps onto the sign bit. Ordering queries sort on `(idx < 0, idx)`
//! to recover unsigned order.

use std::f64::consts::FRAC_1_SQRT_2;
use std::path::PathBuf;

use rusqlite::{params, Connection, OptionalExtension, Transaction};
use tempfile::NamedTempFile;

use crate::error::{Error, Result};

use super::array::{submasks, MAX_DIFFUSION_QUBITS};
use super::{Amplitude, KeyRewrite, Storage};

/// Environment variable naming the directory for store files.
pub const STORE_DIR_ENV: &str = "QSPARSE_STORE_DIR";

const TABLES: [&str; 2] = ["amp_0", "amp_1"];

fn key(idx: u64) -> i64 {
    idx as i64
}

fn store_dir() -> PathBuf {
    std::env::var_os(STORE_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir)
}

pub(crate) struct IndexedStorage {
    conn: Connection,
    live: usize,
    /// Mask the `pat` table currently enumerates, if any.
    patterns_for: Option<u64>,
    // Dropped after `conn` so the file outlives the connection.
    _file: NamedTempFile,
}

impl IndexedStorage {
    pub(crate) fn create(entries: &[(u64, Amplitude)]) -> Result<Self> {
        let file = tempfile::Builder::new()
            .prefix("qsparse-")
            .suffix(".db")
            .tempfile_in(store_dir())?;
        let conn = Connection::open(file.path())?;
        conn.execute_batch(
            "PRAGMA journal_mode = OFF;
             PRAGMA synchronous = OFF;
             PRAGMA temp_store = MEMORY;
             PRAGMA cache_size = -65536;
             CREATE TABLE amp_0 (idx INTEGER PRIMARY KEY, re REAL NOT NULL, im REAL NOT NULL);
             CREATE TABLE amp_1 (idx INTEGER PRIMARY KEY, re REAL NOT NULL, im REAL NOT NULL);
             CREATE TABLE pat (p INTEGER PRIMARY KEY);",
        )?;
        let mut store = IndexedStorage { conn, live: 0, patterns_for: None, _file: file };
        store.insert_all(entries)?;
        Ok(store)
    }

    fn insert_all(&mut self, entries: &[(u64, Amplitude)]) -> Result<()> {
        let tx = self.conn.transaction()?;
        {
            let mut stmt = tx.prepare(&format!(
                "INSERT INTO {} (idx, re, im) VALUES (?1, ?2, ?3)",
                TABLES[self.live]
            ))?;
            for &(idx, a) in entries {
                stmt.execute(params![key(idx), a.re, a.im])?;
            }
        }
        tx.commit()?;
        Ok(())
    }

    fn src(&self) -> &'static str {
        TABLES[self.live]
    }

    /// Runs `fill(tx, src, dst)` against an emptied idle table and makes it live.
    fn transform<F>(&mut self, fill: F) -> Result<()>
    where
        F: FnOnce(&Transaction<'_>, &str, &str) -> rusqlite::Result<()>,
    {
        let src = TABLES[self.live];
        let dst = TABLES[1 - self.live];
        let tx = self.conn.transaction()?;
        tx.execute(&format!("DELETE FROM {dst}"), [])?;
        fill(&tx, src, dst)?;
        tx.execute(&format!("DELETE FROM {src}"), [])?;
        tx.commit()?;
        self.live = 1 - self.live;
        Ok(())
    }

    fn ensure_patterns(&mut self, mask: u64) -> Result<()> {
        if self.patterns_for == Some(mask) {
            return Ok(());
        }
        let tx = self.conn.transaction()?;
        tx.execute("DELETE FROM pat", [])?;
        {
            let mut stmt = tx.prepare("INSERT INTO pat (p) VALUES (?1)")?;
            for p in submasks(mask) {
                stmt.execute([key(p)])?;
            }
        }
        tx.commit()?;
        self.patterns_for = Some(mask);
        Ok(())
    }
}

impl Storage for IndexedStorage {
    fn len(&self) -> Result<usize> {
        let n: i64 = self
            .conn
            .query_row(&format!("SELECT COUNT(*) FROM {}", self.src()), [], |r| r.get(0))?;
        Ok(n as usize)
    }

    fn entries(&self) -> Result<Vec<(u64, Amplitude)>> {
        let mut stmt = self.conn.prepare(&format!(
            "SELECT idx, re, im FROM {} ORDER BY (idx < 0), idx",
            self.src()
        ))?;
        let rows = stmt.query_map([], |r| {
            Ok((r.get::<_, i64>(0)? as u64, Amplitude::new(r.get(1)?, r.get(2)?)))
        })?;
        Ok(rows.collect::<rusqlite::Result<Vec<_>>>()?)
    }

    fn amplitude(&self, idx: u64) -> Result<Amplitude> {
        let found = self
            .conn
            .query_row(
                &format!("SELECT re, im FROM {} WHERE idx = ?1", self.src()),
                [key(idx)],
                |r| Ok(Amplitude::new(r.get(0)?, r.get(1)?)),
            )
            .optional()?;
        Ok(found.unwrap_or_default())
    }

    fn norm_sqr(&self) -> Result<f64> {
        let total: Option<f64> = self.conn.query_row(
            &format!("SELECT SUM(re * re + im * im) FROM {}", self.src()),
            [],
            |r| r.get(0),
        )?;
        Ok(total.unwrap_or(0.0))
    }

    fn hadamard(&mut self, bit: u64, eps: f64) -> Result<()> {
        self.transform(|tx, src, dst| {
            tx.execute(
                &format!(
                    "INSERT INTO {dst} (idx, re, im)
                     SELECT k, SUM(re), SUM(im) FROM (
                         SELECT idx & ~?1 AS k, re * ?2 AS re, im * ?2 AS im FROM {src}
                         UNION ALL
                         SELECT idx | ?1 AS k,
                                CASE WHEN idx & ?1 != 0 THEN -(re * ?2) ELSE re * ?2 END AS re,
                                CASE WHEN idx & ?1 != 0 THEN -(im * ?2) ELSE im * ?2 END AS im
                         FROM {src}
                     )
                     GROUP BY k
                     HAVING SUM(re) * SUM(re) + SUM(im) * SUM(im) >= ?3"
                ),
                params![key(bit), FRAC_1_SQRT_2, eps * eps],
            )?;
            Ok(())
        })
    }

    fn rewrite(&mut self, rewrite: KeyRewrite) -> Result<()> {
        // SQLite has no XOR operator: x ^ m == (x | m) & ~(x & m).
        self.transform(|tx, src, dst| {
            match rewrite {
                KeyRewrite::ControlledFlip { controls, target } => tx.execute(
                    &format!(
                        "INSERT INTO {dst} (idx, re, im)
                         SELECT CASE WHEN idx & ?1 = ?1 THEN (idx | ?2) & ~(idx & ?2) ELSE idx END,
                                re, im
                         FROM {src}"
                    ),
                    params![key(controls), key(target)],
                )?,
                KeyRewrite::Swap { a, b } => tx.execute(
                    &format!(
                        "INSERT INTO {dst} (idx, re, im)
                         SELECT CASE WHEN (idx & ?1 = 0) != (idx & ?2 = 0)
                                     THEN (idx | ?3) & ~(idx & ?3) ELSE idx END,
                                re, im
                         FROM {src}"
                    ),
                    params![key(a), key(b), key(a | b)],
                )?,
            };
            Ok(())
        })
    }

    fn negate_zero_pattern(&mut self, mask: u64) -> Result<()> {
        self.conn.execute(
            &format!("UPDATE {} SET re = -re, im = -im WHERE idx & ?1 = 0", self.src()),
            [key(mask)],
        )?;
        Ok(())
    }

    fn remove_where_set(&mut self, bit: u64) -> Result<f64> {
        let src = self.src();
        let tx = self.conn.transaction()?;
        let removed: Option<f64> = tx.query_row(
            &format!("SELECT SUM(re * re + im * im) FROM {src} WHERE idx & ?1 != 0"),
            [key(bit)],
            |r| r.get(0),
        )?;
        tx.execute(&format!("DELETE FROM {src} WHERE idx & ?1 != 0"), [key(bit)])?;
        tx.commit()?;
        Ok(removed.unwrap_or(0.0))
    }

    fn divide(&mut self, norm: f64) -> Result<()> {
        self.conn.execute(
            &format!("UPDATE {} SET re = re / ?1, im = im / ?1", self.src()),
            [norm],
        )?;
        Ok(())
    }

    fn prune(&mut self, eps: f64) -> Result<()> {
        self.conn.execute(
            &format!("DELETE FROM {} WHERE re * re + im * im < ?1", self.src()),
            [eps * eps],
        )?;
        Ok(())
    }

    fn diffusion(&mut self, mask: u64, eps: f64) -> Result<()> {
        let width = mask.count_ones();
        if width > MAX_DIFFUSION_QUBITS {
            return Err(Error::Capacity(format!(
                "diffusion over {width} qubits exceeds {MAX_DIFFUSION_QUBITS}"
            )));
        }
        self.ensure_patterns(mask)?;
        let scale = 1.0 / (1u64 << width) as f64;
        // One statement: group means over the non-search bits, then 2m - a for
        // every search pattern of every group with a non-zero mean.
        self.transform(|tx, src, dst| {
            tx.execute(
                &format!(
                    "INSERT INTO {dst} (idx, re, im)
                     WITH grp AS (
                         SELECT idx & ~?1 AS g, SUM(re) * ?2 AS mre, SUM(im) * ?2 AS mim
                         FROM {src} GROUP BY g
                     )
                     SELECT idx, re, im FROM (
                         SELECT grp.g | pat.p AS idx,
                                2.0 * grp.mre - COALESCE(s.re, 0.0) AS re,
                                2.0 * grp.mim - COALESCE(s.im, 0.0) AS im
                         FROM grp CROSS JOIN pat
                         LEFT JOIN {src} AS s ON s.idx = (grp.g | pat.p)
                         WHERE grp.mre != 0.0 OR grp.mim != 0.0
                         UNION ALL
                         SELECT s.idx AS idx, -s.re AS re, -s.im AS im
                         FROM {src} AS s JOIN grp ON grp.g = (s.idx & ~?1)
                         WHERE grp.mre = 0.0 AND grp.mim = 0.0
                     )
                     WHERE re * re + im * im >= ?3"
                ),
                params![key(mask), scale, eps * eps],
            )?;
            Ok(())
        })
    }

    fn retain_largest(&mut self, limit: usize) -> Result<f64> {
        if self.len()? <= limit {
            return Ok(0.0);
        }
        let limit = limit as i64;
        let mut removed = 0.0;
        self.transform(|tx, src, dst| {
            let order = "ORDER BY (re * re + im * im) DESC, (idx < 0), idx";
            removed = tx
                .query_row(
                    &format!(
                        "SELECT SUM(m) FROM (
                             SELECT re * re + im * im AS m FROM {src} {order} LIMIT -1 OFFSET ?1
                         )"
                    ),
                    [limit],
                    |r| r.get::<_, Option<f64>>(0),
                )?
                .unwrap_or(0.0);
            tx.execute(
                &format!(
                    "INSERT INTO {dst} (idx, re, im)
                     SELECT idx, re, im FROM {src} {order} LIMIT ?1"
                ),
                [limit],
            )?;
            Ok(())
        })?;
        Ok(removed)
    }
}
