//! Whitespace-separated edge lists: one `u v [w]` per line, `#` or `%`
//! comments, weight 1 when omitted.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::dks::WeightedGraph;
use crate::error::{Error, Result};

/// Loads an edge list. Vertices are numbered `0..=max id`.
///
/// Repeated arcs `u v` are summed. In undirected mode an edge listed in
/// both directions is averaged, so `0 1 2` plus `1 0 2` is one edge of
/// weight 2; in directed mode the arcs are kept and symmetrized by
/// [`WeightedGraph::to_matrix`]. Self-loops are dropped and counted.
pub fn load_edge_list(path: impl AsRef<Path>, directed: bool) -> Result<WeightedGraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, path, directed)
}

pub(crate) fn parse_edge_list(text: &str, path: &Path, directed: bool) -> Result<WeightedGraph> {
    let perr = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut arcs: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut n = 0;
    for (ln, l) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        let t = l.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        if toks.len() != 2 && toks.len() != 3 {
            return Err(perr(ln, format!("expected 'u v [w]', found {} fields", toks.len())));
        }
        let vertex = |tok: &str| -> Result<usize> {
            tok.parse()
                .map_err(|_| perr(ln, format!("cannot parse vertex id {tok:?}")))
        };
        let (u, v) = (vertex(toks[0])?, vertex(toks[1])?);
        let w = match toks.get(2) {
            Some(tok) => tok
                .parse::<f64>()
                .ok()
                .filter(|w| w.is_finite() && *w >= 0.0)
                .ok_or_else(|| perr(ln, format!("weight {tok:?} is not a finite non-negative number")))?,
            None => 1.0,
        };
        n = n.max(u + 1).max(v + 1);
        *arcs.entry((u, v)).or_insert(0.0) += w;
    }
    if n == 0 {
        return Err(perr(0, "no edges".into()));
    }
    let loops = arcs.keys().filter(|(u, v)| u == v).count();
    if loops > 0 {
        log::warn!("{}: dropped {loops} self-loop(s)", path.display());
    }
    let edges = if directed {
        arcs.into_iter().map(|((u, v), w)| (u, v, w)).collect()
    } else {
        let mut out = Vec::new();
        for (&(u, v), &w) in &arcs {
            match arcs.get(&(v, u)) {
                Some(&back) if u < v => out.push((u, v, 0.5 * (w + back))),
                Some(_) if u != v => {}
                _ => out.push((u, v, w)),
            }
        }
        out
    };
    WeightedGraph::new(n, edges, directed)
}
