use std::collections::{HashSet, VecDeque};

/// Bounded set of recently seen message fingerprints. Oldest entries fall out
/// first once `capacity` is reached.
#[derive(Clone, Debug)]
pub struct ReplayCache {
    capacity: usize,
    order: VecDeque<[u8; 32]>,
    seen: HashSet<[u8; 32]>,
}

impl ReplayCache {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity: capacity.max(1),
            order: VecDeque::new(),
            seen: HashSet::new(),
        }
    }

    pub fn contains(&self, key: &[u8; 32]) -> bool {
        self.seen.contains(key)
    }

    /// Records `key`; false if it was already present.
    pub fn insert(&mut self, key: [u8; 32]) -> bool {
        if !self.seen.insert(key) {
            return false;
        }
        self.order.push_back(key);
        if self.order.len() > self.capacity {
            if let Some(old) = self.order.pop_front() {
                self.seen.remove(&old);
            }
        }
        true
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evicts_oldest() {
        let mut c = ReplayCache::new(2);
        assert!(c.insert([1; 32]));
        assert!(!c.insert([1; 32]));
        assert!(c.insert([2; 32]));
        assert!(c.insert([3; 32]));
        assert!(!c.contains(&[1; 32]));
        assert!(c.contains(&[3; 32]));
        assert_eq!(c.len(), 2);
    }
}
