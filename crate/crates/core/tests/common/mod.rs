use std::collections::BTreeSet;

use ttforge::freegroup::FreeWord;

/// Rank of the subgroup of `F_n` generated by `words`, by folding a bouquet
/// of labelled cycles with a plain union-find.
pub fn oracle_rank(words: &[FreeWord]) -> usize {
    // Edges as (from, label dart, to); a backward letter is stored reversed.
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    let mut next = 1;
    for w in words.iter().filter(|w| !w.is_identity()) {
        let letters = w.letters();
        let mut cur = 0;
        for (i, d) in letters.iter().enumerate() {
            let to = if i + 1 == letters.len() {
                0
            } else {
                next += 1;
                next - 1
            };
            if d.is_forward() {
                edges.push((cur, d.edge().0, to));
            } else {
                edges.push((to, d.edge().0, cur));
            }
            cur = to;
        }
    }
    let mut parent: Vec<usize> = (0..next).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    loop {
        let norm: BTreeSet<(usize, usize, usize)> =
            edges.iter().map(|&(a, l, b)| (find(&mut parent, a), l, find(&mut parent, b))).collect();
        edges = norm.into_iter().collect();
        let mut merge = None;
        'search: for (i, &(a, l, b)) in edges.iter().enumerate() {
            for &(c, m, d) in &edges[i + 1..] {
                if l == m && a == c && b != d {
                    merge = Some((b, d));
                    break 'search;
                }
                if l == m && b == d && a != c {
                    merge = Some((a, c));
                    break 'search;
                }
            }
        }
        match merge {
            Some((x, y)) => {
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                parent[rx] = ry;
            }
            None => break,
        }
    }
    let verts: BTreeSet<usize> = edges.iter().flat_map(|&(a, _, b)| [a, b]).chain([find(&mut parent, 0)]).collect();
    edges.len() + 1 - verts.len()
}
