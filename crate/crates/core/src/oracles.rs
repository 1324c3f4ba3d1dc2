//! Optimal document exchange at toy sizes by graph colouring.
//!
//! Vertices are all bit strings shorter than `n_max + t`. Two vertices are
//! adjacent when some string is reachable from both within one `(k, t)`
//! budget, so that a receiver holding that string can tell them apart by
//! colour. Balls are symmetric (an insertion undoes a deletion of equal
//! cost and a transposition undoes another), hence the receiver searches
//! its own ball for the one string carrying the sent colour.

use std::collections::HashMap;

use crate::edit::ball_unchecked;
use crate::{clog2, Error, Result};

pub const MAX_N: usize = 10;
pub const MAX_K: usize = 1;
pub const MAX_T: usize = 2;

#[derive(Debug, Clone)]
pub struct ColoringTable {
    pub n_max: usize,
    pub k: usize,
    pub t: usize,
    /// Vertices in shortlex order.
    pub vertices: Vec<Vec<u8>>,
    pub color_of: HashMap<Vec<u8>, u32>,
    pub colors: u32,
    adj: Vec<Vec<u32>>,
}

fn all_strings_below(len: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for l in 0..len {
        for v in 0..(1usize << l) {
            out.push((0..l).rev().map(|b| ((v >> b) & 1) as u8).collect());
        }
    }
    out
}

pub fn coloring_build(n_max: usize, k: usize, t: usize) -> Result<ColoringTable> {
    if n_max > MAX_N || k > MAX_K || t > MAX_T {
        return Err(Error::TooLarge(format!(
            "colouring limited to n <= {MAX_N}, k <= {MAX_K}, t <= {MAX_T}"
        )));
    }
    let vertices = all_strings_below(n_max + t);
    let mut reached_by: HashMap<Vec<u8>, Vec<u32>> = HashMap::new();
    for (i, v) in vertices.iter().enumerate() {
        for y in ball_unchecked(v, k, t) {
            reached_by.entry(y).or_default().push(i as u32);
        }
    }
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); vertices.len()];
    for group in reached_by.values() {
        for &a in group {
            for &b in group {
                if a != b {
                    adj[a as usize].push(b);
                }
            }
        }
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    let mut color = vec![u32::MAX; vertices.len()];
    let mut colors = 0;
    let mut taken = Vec::new();
    for v in 0..vertices.len() {
        taken.clear();
        taken.resize(adj[v].len() + 1, false);
        for &u in &adj[v] {
            let c = color[u as usize] as usize;
            if c < taken.len() {
                taken[c] = true;
            }
        }
        let c = taken.iter().position(|&x| !x).unwrap() as u32;
        color[v] = c;
        colors = colors.max(c + 1);
    }
    let color_of = vertices.iter().cloned().zip(color).collect();
    Ok(ColoringTable { n_max, k, t, vertices, color_of, colors, adj })
}

impl ColoringTable {
    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// No edge joins two vertices of the same colour.
    pub fn is_proper(&self) -> bool {
        self.adj.iter().enumerate().all(|(v, ns)| {
            let c = self.color_of[&self.vertices[v]];
            ns.iter().all(|&u| self.color_of[&self.vertices[u as usize]] != c)
        })
    }

    /// Bits needed to send a colour.
    pub fn sketch_bits(&self) -> usize {
        clog2(self.colors.max(1) as usize)
    }
}

pub fn coloring_sketch(x: &[u8], table: &ColoringTable) -> Result<u32> {
    table
        .color_of
        .get(x)
        .copied()
        .ok_or_else(|| Error::OutOfRange(format!("{}-bit string outside the table", x.len())))
}

pub fn coloring_recover(y: &[u8], color: u32, table: &ColoringTable) -> Result<Vec<u8>> {
    let mut found: Option<Vec<u8>> = None;
    for cand in ball_unchecked(y, table.k, table.t) {
        if table.color_of.get(&cand) == Some(&color) {
            if found.is_some() {
                return Err(Error::Ambiguous(format!("two strings of colour {color} near y")));
            }
            found = Some(cand);
        }
    }
    found.ok_or_else(|| Error::DecodeFailed(format!("no string of colour {color} near y")))
}
