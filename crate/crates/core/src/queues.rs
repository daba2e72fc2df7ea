//! System of queues: `(point, label)` couples sorted into integer-keyed
//! buckets, ordered inside a bucket by entering time.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::population::Label;

/// Value of the queue metric for a couple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Key {
    Bucket(i64),
    /// The couple is never stored.
    Out,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Discipline {
    Fifo,
    Lifo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PushOutcome {
    Accepted,
    FilteredOut,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueueEntry<P> {
    pub point: P,
    pub label: Label,
    /// Entering time, unique across the whole system.
    pub seq: u64,
}

type KeyFn<P> = Box<dyn Fn(&P, Label) -> Key + Send + Sync>;

pub struct SystemQueue<P> {
    key: KeyFn<P>,
    discipline: Discipline,
    buckets: BTreeMap<i64, VecDeque<QueueEntry<P>>>,
    selected: i64,
    next_seq: u64,
}

impl<P> SystemQueue<P> {
    pub fn new(
        key: impl Fn(&P, Label) -> Key + Send + Sync + 'static,
        discipline: Discipline,
    ) -> Self {
        SystemQueue {
            key: Box::new(key),
            discipline,
            buckets: BTreeMap::new(),
            selected: 0,
            next_seq: 0,
        }
    }

    pub fn discipline(&self) -> Discipline {
        self.discipline
    }

    pub fn push(&mut self, point: P, label: Label) -> PushOutcome {
        match (self.key)(&point, label) {
            Key::Out => PushOutcome::FilteredOut,
            Key::Bucket(k) => {
                let seq = self.next_seq;
                self.next_seq += 1;
                self.buckets
                    .entry(k)
                    .or_default()
                    .push_back(QueueEntry { point, label, seq });
                PushOutcome::Accepted
            }
        }
    }

    pub fn select_queue(&mut self, key: i64) {
        self.selected = key;
    }

    pub fn selected(&self) -> i64 {
        self.selected
    }

    pub fn empty(&self) -> bool {
        self.buckets.get(&self.selected).is_none_or(VecDeque::is_empty)
    }

    pub fn pop(&mut self) -> Result<(P, Label)> {
        self.pop_entry().map(|e| (e.point, e.label))
    }

    /// Like [`pop`](Self::pop) but keeps the entering time.
    pub fn pop_entry(&mut self) -> Result<QueueEntry<P>> {
        let bucket = self
            .buckets
            .get_mut(&self.selected)
            .ok_or(Error::EmptyQueue(self.selected))?;
        let entry = match self.discipline {
            Discipline::Fifo => bucket.pop_front(),
            Discipline::Lifo => bucket.pop_back(),
        };
        entry.ok_or(Error::EmptyQueue(self.selected))
    }

    /// Entries stored in bucket `key`.
    pub fn bucket_len(&self, key: i64) -> usize {
        self.buckets.get(&key).map_or(0, VecDeque::len)
    }

    /// Entries stored across all buckets.
    pub fn len(&self) -> usize {
        self.buckets.values().map(VecDeque::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of accepted pushes so far.
    pub fn accepted(&self) -> u64 {
        self.next_seq
    }
}

impl<P: fmt::Debug> fmt::Debug for SystemQueue<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SystemQueue")
            .field("discipline", &self.discipline)
            .field("selected", &self.selected)
            .field("buckets", &self.buckets)
            .finish_non_exhaustive()
    }
}
