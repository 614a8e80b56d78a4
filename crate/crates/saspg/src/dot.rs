//! DOT rendering of games, optionally highlighting a region and the moves of
//! a memoryless strategy.

use std::fmt::Write as _;

use crate::game::{Owner, StochasticGame};
use crate::set::VertexSet;
use crate::strategy::MemorylessStrategy;

/// Graphviz text for a game. Player-1 vertices are circles, Player-2
/// vertices boxes, probabilistic vertices diamonds; region members are
/// filled, strategy edges bold.
pub fn game_to_dot(
    g: &StochasticGame,
    region: Option<&VertexSet>,
    strategy: Option<&MemorylessStrategy>,
) -> String {
    let mut out = String::from("digraph game {\n  rankdir=LR;\n");
    for v in g.vertices() {
        let shape = match g.owner(v) {
            Owner::P1 => "circle",
            Owner::P2 => "box",
            Owner::Random => "diamond",
        };
        let name = g.label(v).map(str::to_owned).unwrap_or_else(|| format!("v{v}"));
        let fill = if region.is_some_and(|r| r.contains(v)) { ", style=filled, fillcolor=lightblue" } else { "" };
        let _ = writeln!(
            out,
            "  n{v} [shape={shape}, label=\"{name}\\n({},{})\"{fill}];",
            g.prio1(v),
            g.prio2(v)
        );
    }
    for v in g.vertices() {
        for (k, &s) in g.succ(v).iter().enumerate() {
            let mut attrs = Vec::new();
            if g.owner(v) == Owner::Random {
                attrs.push(format!("label=\"{}\"", g.delta(v)[k]));
            }
            if strategy.and_then(|st| st.mv(v)) == Some(s) {
                attrs.push("penwidth=2.5".to_string());
            }
            let attr_text =
                if attrs.is_empty() { String::new() } else { format!(" [{}]", attrs.join(", ")) };
            let _ = writeln!(out, "  n{v} -> n{s}{attr_text};");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::infinite_memory_mdp;

    #[test]
    fn renders_fig1() {
        let g = infinite_memory_mdp();
        let dot = game_to_dot(&g, Some(&VertexSet::from_iter(4, [0])), None);
        assert!(dot.contains("diamond"));
        assert!(dot.contains("1/2"));
        assert!(dot.contains("lightblue"));
        assert!(dot.starts_with("digraph"));
    }
}
