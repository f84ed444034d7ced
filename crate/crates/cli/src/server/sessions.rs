use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use dcv_core::validate::Selection;
use dcv_core::DataSet;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SessionState {
    AwaitingSelection,
    AwaitingAnswers,
    Completed,
}

/// One validation flow. States only move forward: AwaitingSelection →
/// AwaitingAnswers → Completed, with the middle state skipped when the
/// client opts into default answers.
#[derive(Debug)]
pub struct Session {
    pub id: String,
    pub data: DataSet,
    pub sop_class_uid: String,
    pub iod_name: String,
    pub state: SessionState,
    pub selection: Option<Selection>,
    pub report_json: Option<String>,
    pub created_at: Instant,
}

impl Session {
    pub fn new(id: String, data: DataSet, sop_class_uid: String, iod_name: String) -> Self {
        Session {
            id,
            data,
            sop_class_uid,
            iod_name,
            state: SessionState::AwaitingSelection,
            selection: None,
            report_json: None,
            created_at: Instant::now(),
        }
    }
}

/// In-memory session store. The outer lock guards the map only; each session
/// has its own async mutex, so requests to the same session serialize while
/// different sessions proceed concurrently. Nothing is ever written to disk.
pub struct SessionStore {
    ttl: Duration,
    inner: Mutex<HashMap<String, Arc<tokio::sync::Mutex<Session>>>>,
}

impl SessionStore {
    pub fn new(ttl: Duration) -> Self {
        SessionStore {
            ttl,
            inner: Mutex::new(HashMap::new()),
        }
    }

    pub fn insert(&self, session: Session) {
        let mut map = self.inner.lock().expect("session map lock");
        // opportunistic sweep keeps the map from accumulating dead sessions
        let ttl = self.ttl;
        map.retain(|_, entry| match entry.try_lock() {
            Ok(s) => s.created_at.elapsed() <= ttl,
            Err(_) => true,
        });
        map.insert(
            session.id.clone(),
            Arc::new(tokio::sync::Mutex::new(session)),
        );
    }

    /// Looks a session up. `Err(true)` means it existed but has expired (and
    /// has now vanished); `Err(false)` means it never existed.
    pub fn get(&self, id: &str) -> Result<Arc<tokio::sync::Mutex<Session>>, bool> {
        let mut map = self.inner.lock().expect("session map lock");
        let entry = map.get(id).cloned().ok_or(false)?;
        let expired = match entry.try_lock() {
            Ok(session) => session.created_at.elapsed() > self.ttl,
            Err(_) => false,
        };
        if expired {
            map.remove(id);
            return Err(true);
        }
        Ok(entry)
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("session map lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
