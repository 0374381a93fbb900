use std::fs;
use std::path::Path;

use super::{AssocError, DocumentHit, SearchClient};

/// Local stand-in for a web search engine: one plain-text document per file
/// in a directory. A search returns every document containing at least one
/// query term, ranked by file name order.
#[derive(Debug, Clone, Default)]
pub struct CorpusClient {
    docs: Vec<(String, Vec<String>)>,
}

impl CorpusClient {
    pub fn open(dir: &Path) -> Result<Self, AssocError> {
        let io = |e: std::io::Error| AssocError::Client(format!("{}: {e}", dir.display()));
        let mut names = Vec::new();
        for entry in fs::read_dir(dir).map_err(io)? {
            let entry = entry.map_err(io)?;
            if entry.file_type().map_err(io)?.is_file() {
                names.push(entry.path());
            }
        }
        names.sort();
        let mut docs = Vec::with_capacity(names.len());
        for path in names {
            let bytes = fs::read(&path).map_err(io)?;
            let text = String::from_utf8_lossy(&bytes);
            let name = path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            docs.push((name, DocumentHit::from_text(0, &text).tokens));
        }
        Ok(CorpusClient { docs })
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }
}

impl SearchClient for CorpusClient {
    fn search(&self, terms: &[String]) -> Result<Vec<DocumentHit>, AssocError> {
        Ok(self
            .docs
            .iter()
            .filter(|(_, tokens)| tokens.iter().any(|t| terms.contains(t)))
            .enumerate()
            .map(|(i, (_, tokens))| DocumentHit {
                rank: i + 1,
                tokens: tokens.clone(),
            })
            .collect())
    }
}

/// Returns the same hits for every query.
#[derive(Debug, Clone, Default)]
pub struct StaticClient {
    pub hits: Vec<DocumentHit>,
}

impl SearchClient for StaticClient {
    fn search(&self, _terms: &[String]) -> Result<Vec<DocumentHit>, AssocError> {
        Ok(self.hits.clone())
    }
}
