use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::alphabet::{matrix_hash, Alphabet};
use crate::matrix::IntMatrix;

const ROOT: u32 = 0;

/// Words stored as parent pointers: node `i` is `word(parent) + letter`.
pub(crate) struct Arena {
    nodes: Vec<(u32, u16)>,
}

impl Arena {
    fn new() -> Self {
        Arena {
            nodes: vec![(u32::MAX, 0)],
        }
    }

    fn push(&mut self, parent: u32, letter: u16) -> u32 {
        self.nodes.push((parent, letter));
        (self.nodes.len() - 1) as u32
    }

    fn get(&self, id: u32) -> (u32, u16) {
        self.nodes[id as usize]
    }

    pub(crate) fn word(&self, mut id: u32) -> Vec<u16> {
        let mut w = Vec::new();
        while id != ROOT {
            let (p, l) = self.nodes[id as usize];
            w.push(l);
            id = p;
        }
        w.reverse();
        w
    }
}

/// First occurrences by matrix hash. Hash hits are confirmed by rebuilding
/// the stored word's matrix; genuine collisions go to an overflow list.
struct Dedup {
    first: HashMap<u64, u32>,
    overflow: HashMap<u64, Vec<u32>>,
}

impl Dedup {
    fn new() -> Self {
        Dedup {
            first: HashMap::new(),
            overflow: HashMap::new(),
        }
    }

    fn candidates(&self, h: u64) -> impl Iterator<Item = u32> + '_ {
        self.first
            .get(&h)
            .copied()
            .into_iter()
            .chain(self.overflow.get(&h).into_iter().flatten().copied())
    }

    /// Records `node` unless an equal matrix is already known.
    fn insert(&mut self, h: u64, m: &IntMatrix, node: u32, arena: &Arena, alphabet: &Alphabet) -> bool {
        let seen = self
            .candidates(h)
            .any(|id| alphabet.product(&arena.word(id)) == *m);
        if seen {
            return false;
        }
        if self.first.contains_key(&h) {
            self.overflow.entry(h).or_default().push(node);
        } else {
            self.first.insert(h, node);
        }
        true
    }

    fn is_first(&self, h: u64, parent: u32, letter: u16, arena: &Arena) -> bool {
        self.candidates(h).any(|id| arena.get(id) == (parent, letter))
    }
}

pub(crate) enum Event {
    Candidate { node: u32, matrix: IntMatrix },
    Duplicate,
    GuardAbort,
}

pub(crate) struct Limits {
    pub max_len: usize,
    pub entry_bits: u64,
}

struct Frame {
    node: u32,
    matrix: IntMatrix,
    last: Option<u16>,
    next: u16,
}

/// Words by length, then lexicographically, as iterative deepening. Only
/// first occurrences are extended.
pub(crate) struct Bfs {
    arena: Arena,
    dedup: Dedup,
    depth: usize,
    stack: Vec<Frame>,
    grew: bool,
    done: bool,
}

impl Bfs {
    pub(crate) fn new(n: usize) -> Self {
        let id = IntMatrix::identity(n);
        let mut dedup = Dedup::new();
        dedup.first.insert(matrix_hash(&id), ROOT);
        Bfs {
            arena: Arena::new(),
            dedup,
            depth: 0,
            stack: Vec::new(),
            grew: true,
            done: false,
        }
    }

    pub(crate) fn arena(&self) -> &Arena {
        &self.arena
    }

    pub(crate) fn next_event(&mut self, alphabet: &Alphabet, limits: &Limits) -> Option<Event> {
        loop {
            if self.done {
                return None;
            }
            let Some(top) = self.stack.last_mut() else {
                if self.depth >= limits.max_len || !self.grew {
                    self.done = true;
                    return None;
                }
                self.depth += 1;
                self.grew = false;
                self.stack.push(Frame {
                    node: ROOT,
                    matrix: IntMatrix::identity(alphabet_dim(alphabet)),
                    last: None,
                    next: 0,
                });
                continue;
            };
            if top.next as usize >= alphabet.len() {
                self.stack.pop();
                continue;
            }
            let l = top.next;
            top.next += 1;
            if !alphabet.follows(top.last, l, true) {
                continue;
            }
            let child = alphabet.apply(&top.matrix, l);
            let parent = top.node;
            let len = self.stack.len();
            let h = matrix_hash(&child);
            if len == self.depth {
                if child.max_bits() > limits.entry_bits {
                    return Some(Event::GuardAbort);
                }
                let node = self.arena.push(parent, l);
                if self.dedup.insert(h, &child, node, &self.arena, alphabet) {
                    self.grew = true;
                    return Some(Event::Candidate { node, matrix: child });
                }
                self.arena.nodes.pop();
                return Some(Event::Duplicate);
            }
            if self.dedup.is_first(h, parent, l, &self.arena) {
                let node = self
                    .dedup
                    .candidates(h)
                    .find(|&id| self.arena.get(id) == (parent, l))
                    .expect("first occurrence");
                self.stack.push(Frame {
                    node,
                    matrix: child,
                    last: Some(l),
                    next: 0,
                });
            }
        }
    }
}

fn alphabet_dim(a: &Alphabet) -> usize {
    a.matrix(0).rows()
}

/// Seeded random walk from the identity with geometric restarts.
pub(crate) struct RandomWalk {
    arena: Arena,
    dedup: Dedup,
    rng: ChaCha8Rng,
    restart: f64,
    node: u32,
    matrix: IntMatrix,
    len: usize,
    last: Option<u16>,
    n: usize,
}

impl RandomWalk {
    pub(crate) fn new(n: usize, rng: ChaCha8Rng, restart: f64) -> Self {
        let id = IntMatrix::identity(n);
        let mut dedup = Dedup::new();
        dedup.first.insert(matrix_hash(&id), ROOT);
        RandomWalk {
            arena: Arena::new(),
            dedup,
            rng,
            restart,
            node: ROOT,
            matrix: id,
            len: 0,
            last: None,
            n,
        }
    }

    pub(crate) fn arena(&self) -> &Arena {
        &self.arena
    }

    fn reset(&mut self) {
        self.node = ROOT;
        self.matrix = IntMatrix::identity(self.n);
        self.len = 0;
        self.last = None;
    }

    pub(crate) fn next_event(&mut self, alphabet: &Alphabet, limits: &Limits) -> Event {
        if self.len >= limits.max_len || (self.len > 0 && self.rng.gen_bool(self.restart)) {
            self.reset();
        }
        let l = loop {
            let l = self.rng.gen_range(0..alphabet.len()) as u16;
            if alphabet.follows(self.last, l, false) {
                break l;
            }
        };
        let child = alphabet.apply(&self.matrix, l);
        if child.max_bits() > limits.entry_bits {
            self.reset();
            return Event::GuardAbort;
        }
        let node = self.arena.push(self.node, l);
        self.node = node;
        self.len += 1;
        self.last = Some(l);
        let h = matrix_hash(&child);
        let fresh = self.dedup.insert(h, &child, node, &self.arena, alphabet);
        self.matrix = child;
        if fresh {
            Event::Candidate {
                node,
                matrix: self.matrix.clone(),
            }
        } else {
            Event::Duplicate
        }
    }
}
