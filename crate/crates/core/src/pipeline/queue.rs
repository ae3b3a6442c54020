use std::collections::VecDeque;
use std::sync::{Condvar, Mutex};

use serde::{Deserialize, Serialize};

/// What a full queue does with a new item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueuePolicy {
    /// The producer waits for space.
    #[default]
    Block,
    /// The oldest queued item is discarded.
    DropOldest,
}

struct State<T> {
    items: VecDeque<T>,
    closed: bool,
    dropped: u64,
}

/// Multi-producer, multi-consumer bounded FIFO.
pub struct BoundedQueue<T> {
    capacity: usize,
    policy: QueuePolicy,
    state: Mutex<State<T>>,
    not_empty: Condvar,
    not_full: Condvar,
}

impl<T> BoundedQueue<T> {
    pub fn new(capacity: usize, policy: QueuePolicy) -> Self {
        assert!(capacity > 0, "queue capacity must be positive");
        Self {
            capacity,
            policy,
            state: Mutex::new(State {
                items: VecDeque::with_capacity(capacity),
                closed: false,
                dropped: 0,
            }),
            not_empty: Condvar::new(),
            not_full: Condvar::new(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Enqueues `item`; gives it back if the queue is closed.
    pub fn push(&self, item: T) -> Result<(), T> {
        let mut s = self.state.lock().expect("queue lock poisoned");
        loop {
            if s.closed {
                return Err(item);
            }
            if s.items.len() < self.capacity {
                break;
            }
            match self.policy {
                QueuePolicy::Block => s = self.not_full.wait(s).expect("queue lock poisoned"),
                QueuePolicy::DropOldest => {
                    s.items.pop_front();
                    s.dropped += 1;
                }
            }
        }
        s.items.push_back(item);
        drop(s);
        self.not_empty.notify_one();
        Ok(())
    }

    /// Dequeues the oldest item, waiting while the queue is open and empty.
    /// `None` once closed and drained.
    pub fn pop(&self) -> Option<T> {
        let mut s = self.state.lock().expect("queue lock poisoned");
        loop {
            if let Some(item) = s.items.pop_front() {
                drop(s);
                self.not_full.notify_one();
                return Some(item);
            }
            if s.closed {
                return None;
            }
            s = self.not_empty.wait(s).expect("queue lock poisoned");
        }
    }

    /// No further pushes are accepted; queued items can still be popped.
    pub fn close(&self) {
        self.state.lock().expect("queue lock poisoned").closed = true;
        self.not_empty.notify_all();
        self.not_full.notify_all();
    }

    pub fn len(&self) -> usize {
        self.state.lock().expect("queue lock poisoned").items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Items discarded under [`QueuePolicy::DropOldest`].
    pub fn dropped(&self) -> u64 {
        self.state.lock().expect("queue lock poisoned").dropped
    }
}
