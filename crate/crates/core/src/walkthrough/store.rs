//! In-memory session store with optional file persistence.
//!
//! Each session sits behind its own mutex: mutations of one session are
//! serialised while different sessions proceed independently.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::sync::{Arc, Mutex, RwLock};

use crate::error::{Code, Error, Result};
use crate::walkthrough::{Session, SessionId};

#[derive(Debug, Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<SessionId, Arc<Mutex<Session>>>>,
}

impl SessionStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&self, session: Session) {
        self.sessions
            .write()
            .unwrap()
            .insert(session.id.clone(), Arc::new(Mutex::new(session)));
    }

    fn slot(&self, id: &SessionId) -> Result<Arc<Mutex<Session>>> {
        self.sessions
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| Error::new(Code::UnknownSession, format!("unknown session {id}")))
    }

    /// Latest committed value of a session.
    pub fn get(&self, id: &SessionId) -> Result<Session> {
        Ok(self.slot(id)?.lock().unwrap().clone())
    }

    /// Applies `f` under the session's lock and stores its result. On error
    /// the stored session is left as it was.
    pub fn update(
        &self,
        id: &SessionId,
        f: impl FnOnce(&Session) -> Result<Session>,
    ) -> Result<Session> {
        let slot = self.slot(id)?;
        let mut guard = slot.lock().unwrap();
        let next = f(&guard)?;
        *guard = next.clone();
        Ok(next)
    }

    pub fn len(&self) -> usize {
        self.sessions.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn snapshot(&self) -> Vec<Session> {
        let mut all: Vec<Session> = self
            .sessions
            .read()
            .unwrap()
            .values()
            .map(|s| s.lock().unwrap().clone())
            .collect();
        all.sort_by(|a, b| {
            a.created_at
                .cmp(&b.created_at)
                .then_with(|| a.id.cmp(&b.id))
        });
        all
    }

    /// Writes every session to `path` as a JSON array.
    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(&self.snapshot())
            .map_err(|e| Error::new(Code::Io, e.to_string()))?;
        fs::write(path, json).map_err(|e| Error::new(Code::Io, format!("{}: {e}", path.display())))
    }

    /// Loads sessions saved by [`SessionStore::save`]. A missing file yields
    /// an empty store.
    pub fn load(path: &Path) -> Result<Self> {
        let store = Self::new();
        let text = match fs::read_to_string(path) {
            Ok(text) => text,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(store),
            Err(e) => return Err(Error::new(Code::Io, format!("{}: {e}", path.display()))),
        };
        let sessions: Vec<Session> = serde_json::from_str(&text)
            .map_err(|e| Error::new(Code::Io, format!("{}: {e}", path.display())))?;
        for session in sessions {
            store.insert(session);
        }
        Ok(store)
    }
}
