//! Iterative Tarjan SCC decomposition over masked successor functions.

use crate::game::VertexId;
use crate::set::VertexSet;

/// Strongly connected components of the subgraph induced by `allowed`,
/// using `succ` for adjacency. Components come out in reverse topological
/// order (Tarjan order).
pub(crate) fn sccs_masked<F>(n: usize, allowed: &VertexSet, succ: F) -> Vec<Vec<VertexId>>
where
    F: Fn(VertexId) -> Vec<VertexId>,
{
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<VertexId> = Vec::new();
    let mut next_index = 0usize;
    let mut components = Vec::new();

    // Explicit DFS frames: (vertex, adjacency, position).
    let mut frames: Vec<(VertexId, Vec<VertexId>, usize)> = Vec::new();
    for root in allowed.iter() {
        if index[root] != UNSEEN {
            continue;
        }
        frames.push((root, succ(root), 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(frame) = frames.last_mut() {
            let (v, adj, pos) = (frame.0, &frame.1, &mut frame.2);
            if *pos < adj.len() {
                let w = adj[*pos];
                *pos += 1;
                if !allowed.contains(w) {
                    continue;
                }
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, succ(w), 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    components.push(comp);
                }
                let done = frames.pop().expect("frame");
                if let Some(parent) = frames.last() {
                    let p = parent.0;
                    low[p] = low[p].min(low[done.0]);
                }
            }
        }
    }
    components
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_components() {
        // 0 <-> 1, 2 -> 0, 2 -> 2
        let succ = |v: VertexId| -> Vec<VertexId> {
            match v {
                0 => vec![1],
                1 => vec![0],
                2 => vec![0, 2],
                _ => vec![],
            }
        };
        let mut comps = sccs_masked(3, &VertexSet::full(3), succ);
        for c in &mut comps {
            c.sort_unstable();
        }
        comps.sort();
        assert_eq!(comps, vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn mask_excludes_vertices() {
        let succ = |v: VertexId| -> Vec<VertexId> {
            match v {
                0 => vec![1],
                1 => vec![0],
                _ => vec![],
            }
        };
        let comps = sccs_masked(2, &VertexSet::from_iter(2, [0]), succ);
        assert_eq!(comps, vec![vec![0]]);
    }
}
