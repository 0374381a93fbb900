use std::collections::BTreeSet;

use crate::TuneId;

pub type PostingSet = BTreeSet<TuneId>;

#[derive(Debug, Clone, Default)]
struct Node {
    /// Sorted by character.
    children: Vec<(char, u32)>,
    postings: PostingSet,
}

/// Character trie from normalized terms to posting sets.
#[derive(Debug, Clone)]
pub struct LexicalTree {
    nodes: Vec<Node>,
}

impl Default for LexicalTree {
    fn default() -> Self {
        LexicalTree {
            nodes: vec![Node::default()],
        }
    }
}

impl LexicalTree {
    pub fn new() -> Self {
        Self::default()
    }

    fn find(&self, term: &str) -> Option<usize> {
        let mut at = 0usize;
        for c in term.chars() {
            let children = &self.nodes[at].children;
            let i = children.binary_search_by_key(&c, |e| e.0).ok()?;
            at = children[i].1 as usize;
        }
        Some(at)
    }

    pub fn insert(&mut self, term: &str, tune: TuneId) {
        let mut at = 0usize;
        for c in term.chars() {
            at = match self.nodes[at].children.binary_search_by_key(&c, |e| e.0) {
                Ok(i) => self.nodes[at].children[i].1 as usize,
                Err(i) => {
                    let next = self.nodes.len();
                    self.nodes.push(Node::default());
                    self.nodes[at].children.insert(i, (c, next as u32));
                    next
                }
            };
        }
        self.nodes[at].postings.insert(tune);
    }

    /// Removes one posting. Nodes are kept; an empty posting set reads the
    /// same as an absent term.
    pub fn remove(&mut self, term: &str, tune: TuneId) {
        if let Some(at) = self.find(term) {
            self.nodes[at].postings.remove(&tune);
        }
    }

    /// Exact-term lookup.
    pub fn get(&self, term: &str) -> Option<&PostingSet> {
        self.find(term)
            .map(|at| &self.nodes[at].postings)
            .filter(|p| !p.is_empty())
    }

    /// All terms with a non-empty posting set, in lexicographic order.
    pub fn terms(&self) -> Vec<(String, &PostingSet)> {
        let mut out = Vec::new();
        let mut stack = vec![(0usize, String::new())];
        while let Some((at, prefix)) = stack.pop() {
            let node = &self.nodes[at];
            if !node.postings.is_empty() {
                out.push((prefix.clone(), &node.postings));
            }
            for &(c, child) in node.children.iter().rev() {
                let mut next = prefix.clone();
                next.push(c);
                stack.push((child as usize, next));
            }
        }
        out
    }
}
