//! Oracle backed by a graph file, answering one line per query.

use std::path::Path;

use truncgs_core::{Colour, NodeId, OracleError, OracleReply, PreferenceOracle};

use crate::format::FormatError;

/// Holds the raw file bytes plus the byte range of each node's line, so a
/// query parses only the line it needs. Neighbour weights are ignored.
#[derive(Clone, Debug)]
pub struct FileOracle {
    text: String,
    red_count: u32,
    lines: Vec<Option<(usize, usize)>>,
    queries: u64,
}

impl FileOracle {
    pub fn open(path: &Path) -> std::io::Result<Result<Self, FormatError>> {
        Ok(Self::from_text(std::fs::read_to_string(path)?))
    }

    /// Indexes node lines. Only the header and node ids are checked here;
    /// neighbour tokens are parsed lazily.
    pub fn from_text(text: String) -> Result<Self, FormatError> {
        let bad = |line, reason: &str| FormatError::Malformed { line, reason: reason.into() };
        let mut header = None;
        let mut lines = Vec::new();
        let mut offset = 0;
        for (i, raw) in text.split_inclusive('\n').enumerate() {
            let start = offset;
            offset += raw.len();
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((_, total)) = header else {
                let counts: Vec<u32> = content
                    .split_whitespace()
                    .map(str::parse)
                    .collect::<Result<_, _>>()
                    .map_err(|_| bad(i + 1, "header must be `red_count blue_count`"))?;
                let [r, b] = counts[..] else {
                    return Err(bad(i + 1, "header must be `red_count blue_count`"));
                };
                header = Some((r, r as usize + b as usize));
                lines = vec![None; r as usize + b as usize];
                continue;
            };
            let (id, _) = content.split_once(':').ok_or_else(|| bad(i + 1, "expected `node_id : neighbours`"))?;
            let id: usize = id.trim().parse().map_err(|_| bad(i + 1, "bad node id"))?;
            if id == 0 || id > total || lines[id - 1].is_some() {
                return Err(bad(i + 1, "node id out of range or repeated"));
            }
            lines[id - 1] = Some((start, offset));
        }
        let (red_count, _) = header.ok_or_else(|| bad(1, "missing header"))?;
        Ok(FileOracle { text, red_count, lines, queries: 0 })
    }

    pub fn node_count(&self) -> u64 {
        self.lines.len() as u64
    }
}

impl PreferenceOracle for FileOracle {
    fn query(&mut self, v: NodeId) -> Result<OracleReply, OracleError> {
        self.queries += 1;
        if v.0 == 0 || v.index() >= self.lines.len() {
            return Err(OracleError::UnknownNode(v));
        }
        let colour = if v.0 <= self.red_count { Colour::Red } else { Colour::Blue };
        let Some((start, end)) = self.lines[v.index()] else {
            return Ok(OracleReply { colour, neighbours: Vec::new(), groups: Vec::new() });
        };
        let line = self.text[start..end].split('#').next().unwrap_or("");
        let (_, rest) = line.split_once(':').expect("indexed lines contain a colon");
        let mut neighbours = Vec::new();
        let mut groups = Vec::new();
        for tok in rest.split_whitespace() {
            let id = tok.split([':', ',']).next().unwrap_or("");
            let id = id
                .parse()
                .map_err(|_| OracleError::Unavailable(format!("node {v}: bad neighbour token `{tok}`")))?;
            let group = match groups.last() {
                Some(&g) if tok.ends_with(",tie") => g,
                Some(&g) => g + 1,
                None => 0,
            };
            neighbours.push(NodeId(id));
            groups.push(group);
        }
        Ok(OracleReply { colour, neighbours, groups })
    }

    fn query_count(&self) -> u64 {
        self.queries
    }
}
