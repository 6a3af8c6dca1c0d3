use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::grammar::{canonicalize, Action, ParseResult};

pub const DEFAULT_HISTORY_LEN: usize = 5;

/// The N most recent valid commands, oldest first, in canonical form.
/// Only actions can be pushed, so rejected model output never gets in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommandHistory {
    capacity: usize,
    entries: VecDeque<String>,
}

impl CommandHistory {
    pub fn new(capacity: usize) -> Self {
        Self { capacity, entries: VecDeque::with_capacity(capacity) }
    }

    pub fn push(&mut self, action: &Action) {
        if self.capacity == 0 {
            return;
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(canonicalize(action));
    }

    /// Admits the action of a valid parse; ignores everything else.
    pub fn record(&mut self, parse: &ParseResult) {
        if let Some(action) = parse.action() {
            self.push(&action);
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }
}
