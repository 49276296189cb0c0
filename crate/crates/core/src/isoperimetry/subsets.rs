//! Enumeration of finite subsets of a ball, as sorted lists of ball indices.

use crate::group::{Ball, NONE};

/// Calls `visit` once for every connected subset of the Cayley graph that
/// contains the identity (ball index 0) and has at most `max_size` elements.
///
/// This is the ESU scheme rooted at the identity: a vertex enters the
/// extension set only through the first member of the current subset it is
/// adjacent to, so no subset is produced twice. The ball must have radius at
/// least `max_size - 1`.
pub fn connected_subsets(ball: &Ball, max_size: usize, visit: &mut dyn FnMut(&[u32])) {
    if max_size == 0 || ball.is_empty() {
        return;
    }
    let mut cover = vec![0u32; ball.len()];
    let mut sub = vec![0u32];
    cover[0] += 1;
    let mut ext = Vec::new();
    for &u in ball.neighbors(0) {
        if u != NONE {
            if cover[u as usize] == 0 {
                ext.push(u);
            }
            cover[u as usize] += 1;
        }
    }
    extend(ball, max_size, &mut sub, ext, &mut cover, visit);
}

fn extend(
    ball: &Ball,
    max_size: usize,
    sub: &mut Vec<u32>,
    mut ext: Vec<u32>,
    cover: &mut [u32],
    visit: &mut dyn FnMut(&[u32]),
) {
    let mut sorted = sub.clone();
    sorted.sort_unstable();
    visit(&sorted);
    if sub.len() == max_size {
        return;
    }
    while let Some(w) = ext.pop() {
        let mut next = ext.clone();
        let nbrs = ball.neighbors(w as usize);
        for &u in nbrs {
            if u != NONE && cover[u as usize] == 0 && !next.contains(&u) {
                next.push(u);
            }
        }
        for &u in nbrs {
            if u != NONE {
                cover[u as usize] += 1;
            }
        }
        sub.push(w);
        extend(ball, max_size, sub, next, cover, visit);
        sub.pop();
        for &u in nbrs {
            if u != NONE {
                cover[u as usize] -= 1;
            }
        }
    }
}

/// Calls `visit` for every subset of the ball that contains index 0 and has
/// at most `max_size` elements, connected or not.
pub fn subsets_with_identity(ball: &Ball, max_size: usize, visit: &mut dyn FnMut(&[u32])) {
    if max_size == 0 || ball.is_empty() {
        return;
    }
    let n = ball.len() as u32;
    let mut cur = vec![0u32];
    fn rec(n: u32, start: u32, max_size: usize, cur: &mut Vec<u32>, visit: &mut dyn FnMut(&[u32])) {
        visit(cur);
        if cur.len() == max_size {
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, i + 1, max_size, cur, visit);
            cur.pop();
        }
    }
    rec(n, 1, max_size, &mut cur, visit);
}

/// Number of elements of `sub` with a neighbor outside `sub`.
pub fn inner_boundary(ball: &Ball, sub: &[u32], member: &mut [bool]) -> usize {
    for &i in sub {
        member[i as usize] = true;
    }
    let count = sub
        .iter()
        .filter(|&&i| {
            ball.neighbors(i as usize)
                .iter()
                .any(|&u| u == NONE || !member[u as usize])
        })
        .count();
    for &i in sub {
        member[i as usize] = false;
    }
    count
}
