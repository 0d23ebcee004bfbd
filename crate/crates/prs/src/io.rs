//! Plain-text file formats for graphs, planted instances, and estimates.
//!
//! Graph file: line 1 is `n <n>`; each following `u v` line is a directed
//! edge `u -> v`, 1-indexed. Pairs absent from the file carry no edge. An
//! instance (or estimate) file appends an `S <v1> <v2> ...` line listing the
//! community ascending and a `pi <r1> <r2> ...` line giving the rank of each
//! listed vertex in the same order. Saving is canonical (edges in `i < j`
//! scan order), so load/save round-trips are byte-exact.

use crate::metrics::{Ranking, RankingEstimate};
use crate::model::DirectedAdjacency;
use std::error::Error as StdError;
use std::fmt;
use std::io::{BufRead, Write};

#[derive(Debug)]
pub enum IoError {
    Parse(String),
    Io(std::io::Error),
}

impl fmt::Display for IoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IoError::Parse(msg) => write!(f, "parse error: {msg}"),
            IoError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl StdError for IoError {}

impl From<std::io::Error> for IoError {
    fn from(e: std::io::Error) -> Self {
        IoError::Io(e)
    }
}

fn parse_err(msg: impl Into<String>) -> IoError {
    IoError::Parse(msg.into())
}

/// A parsed instance or estimate file. `community`/`ranking` are present only
/// when the file carried `S`/`pi` lines.
#[derive(Debug, Clone)]
pub struct LoadedFile {
    pub graph: DirectedAdjacency,
    pub community: Option<Vec<usize>>,
    pub ranking: Option<Ranking>,
}

pub fn save_graph<W: Write>(graph: &DirectedAdjacency, w: &mut W) -> Result<(), IoError> {
    writeln!(w, "n {}", graph.n())?;
    write_edges(graph, w)?;
    Ok(())
}

fn write_edges<W: Write>(graph: &DirectedAdjacency, w: &mut W) -> Result<(), IoError> {
    let n = graph.n();
    for i in 0..n {
        for j in (i + 1)..n {
            match graph.get(i, j) {
                1 => writeln!(w, "{} {}", i + 1, j + 1)?,
                -1 => writeln!(w, "{} {}", j + 1, i + 1)?,
                _ => {}
            }
        }
    }
    Ok(())
}

/// Save a graph together with ground truth `(S, pi_S)`.
pub fn save_instance<W: Write>(
    graph: &DirectedAdjacency,
    community: &[usize],
    ranking: &Ranking,
    w: &mut W,
) -> Result<(), IoError> {
    writeln!(w, "n {}", graph.n())?;
    write_edges(graph, w)?;
    write_truth(community, ranking, w)
}

fn write_truth<W: Write>(community: &[usize], ranking: &Ranking, w: &mut W) -> Result<(), IoError> {
    let mut sorted = community.to_vec();
    sorted.sort_unstable();
    let verts: Vec<String> = sorted.iter().map(|&v| (v + 1).to_string()).collect();
    writeln!(w, "S {}", verts.join(" "))?;
    let ranks: Vec<String> = sorted
        .iter()
        .map(|&v| {
            ranking
                .rank_of(v)
                .map(|r| r.to_string())
                .ok_or_else(|| parse_err(format!("vertex {} missing from ranking", v + 1)))
        })
        .collect::<Result<_, _>>()?;
    writeln!(w, "pi {}", ranks.join(" "))?;
    Ok(())
}

/// Save an estimate `(S-hat, pi-hat)` with an empty edge section.
pub fn save_estimate<W: Write>(
    n: usize,
    estimate: &RankingEstimate,
    w: &mut W,
) -> Result<(), IoError> {
    writeln!(w, "n {n}")?;
    write_truth(&estimate.support_sorted(), &estimate.ranking, w)
}

/// Parse a graph, instance, or estimate file.
pub fn load<R: BufRead>(r: &mut R) -> Result<LoadedFile, IoError> {
    let mut lines = r.lines();
    let first = lines.next().ok_or_else(|| parse_err("empty file"))??;
    let n = parse_header(&first)?;
    let mut graph = DirectedAdjacency::zeros(n);
    let mut community: Option<Vec<usize>> = None;
    let mut ranks: Option<Vec<usize>> = None;
    for line in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("S ") {
            let verts = parse_indices(rest, n)?;
            let mut sorted = verts.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted != verts {
                return Err(parse_err("S line must list distinct vertices ascending"));
            }
            community = Some(verts);
        } else if let Some(rest) = line.strip_prefix("pi ") {
            ranks = Some(
                rest.split_whitespace()
                    .map(|t| {
                        t.parse::<usize>()
                            .map_err(|_| parse_err(format!("bad rank token '{t}'")))
                    })
                    .collect::<Result<_, _>>()?,
            );
        } else {
            let (u, v) = parse_edge(line, n)?;
            if graph.get(u, v) != 0 {
                return Err(parse_err(format!(
                    "duplicate edge between {} and {}",
                    u + 1,
                    v + 1
                )));
            }
            graph.set_edge(u, v);
        }
    }
    let ranking = match (&community, ranks) {
        (Some(comm), Some(ranks)) => {
            if ranks.len() != comm.len() {
                return Err(parse_err("pi line length differs from S line"));
            }
            let mut order = vec![usize::MAX; comm.len()];
            for (&v, &r) in comm.iter().zip(ranks.iter()) {
                if r == 0 || r > comm.len() || order[r - 1] != usize::MAX {
                    return Err(parse_err("pi line is not a bijection onto 1..|S|"));
                }
                order[r - 1] = v;
            }
            Some(Ranking::from_order(order).map_err(|e| parse_err(e.to_string()))?)
        }
        (None, Some(_)) => return Err(parse_err("pi line without S line")),
        (Some(_), None) => return Err(parse_err("S line without pi line")),
        (None, None) => None,
    };
    Ok(LoadedFile {
        graph,
        community,
        ranking,
    })
}

fn parse_header(line: &str) -> Result<usize, IoError> {
    let rest = line
        .trim()
        .strip_prefix("n ")
        .ok_or_else(|| parse_err("first line must be 'n <n>'"))?;
    rest.trim()
        .parse::<usize>()
        .map_err(|_| parse_err(format!("bad vertex count '{rest}'")))
}

fn parse_indices(rest: &str, n: usize) -> Result<Vec<usize>, IoError> {
    rest.split_whitespace()
        .map(|t| {
            let v: usize = t
                .parse()
                .map_err(|_| parse_err(format!("bad vertex token '{t}'")))?;
            if v == 0 || v > n {
                return Err(parse_err(format!("vertex {v} out of range 1..={n}")));
            }
            Ok(v - 1)
        })
        .collect()
}

fn parse_edge(line: &str, n: usize) -> Result<(usize, usize), IoError> {
    let mut it = line.split_whitespace();
    let u = it.next().ok_or_else(|| parse_err("empty edge line"))?;
    let v = it
        .next()
        .ok_or_else(|| parse_err(format!("edge line '{line}' missing target")))?;
    if it.next().is_some() {
        return Err(parse_err(format!("trailing tokens on edge line '{line}'")));
    }
    let parse_one = |t: &str| -> Result<usize, IoError> {
        let x: usize = t
            .parse()
            .map_err(|_| parse_err(format!("bad vertex token '{t}'")))?;
        if x == 0 || x > n {
            return Err(parse_err(format!("vertex {x} out of range 1..={n}")));
        }
        Ok(x - 1)
    };
    let (u, v) = (parse_one(u)?, parse_one(v)?);
    if u == v {
        return Err(parse_err("self-loops are not allowed"));
    }
    Ok((u, v))
}
