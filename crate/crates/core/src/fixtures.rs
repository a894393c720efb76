//! Reference graphs used throughout the tests and the README.

use crate::graph::Admg;

/// Six-node graph in which `P_x(y | w)` is identified even though neither
/// `P_x(y, w)` nor `P_x(w)` is: the unidentified factor over `W` cancels.
///
/// Directed `A→B, B→X, X→W, X→Z, Z→Y, W→Y`; bidirected `A↔X, X↔W, A↔Y`.
pub fn cancellation_graph() -> Admg {
    Admg::builder()
        .nodes(["A", "B", "X", "W", "Z", "Y"])
        .directed("A", "B")
        .directed("B", "X")
        .directed("X", "W")
        .directed("X", "Z")
        .directed("Z", "Y")
        .directed("W", "Y")
        .bidirected("A", "X")
        .bidirected("X", "W")
        .bidirected("A", "Y")
        .build()
        .expect("fixture is a valid ADMG")
}

/// Six-node graph where `P_x(y | a)` needs the full four-phase procedure:
/// the block `{A}` is unidentified, yet it does not involve `Y`.
///
/// Directed `X→A, X→Z, A→B, B→W, W→Y, Z→Y`; bidirected `X↔A, X↔W, W↔Y`.
pub fn partition_graph() -> Admg {
    Admg::builder()
        .nodes(["A", "B", "X", "W", "Z", "Y"])
        .directed("X", "A")
        .directed("X", "Z")
        .directed("A", "B")
        .directed("B", "W")
        .directed("W", "Y")
        .directed("Z", "Y")
        .bidirected("X", "A")
        .bidirected("X", "W")
        .bidirected("W", "Y")
        .build()
        .expect("fixture is a valid ADMG")
}

/// `X → Y` with `X ↔ Y`: the textbook unidentified effect.
pub fn confounded_pair() -> Admg {
    Admg::builder()
        .nodes(["X", "Y"])
        .directed("X", "Y")
        .bidirected("X", "Y")
        .build()
        .expect("fixture is a valid ADMG")
}

/// Front-door graph `X → M → Y`, `X ↔ Y`.
pub fn front_door() -> Admg {
    Admg::builder()
        .nodes(["X", "M", "Y"])
        .directed("X", "M")
        .directed("M", "Y")
        .bidirected("X", "Y")
        .build()
        .expect("fixture is a valid ADMG")
}

/// Markovian chain `V0 → V1 → … → V{n-1}`.
pub fn chain(n: usize) -> Admg {
    let names: Vec<String> = (0..n).map(|i| format!("V{i}")).collect();
    let mut b = Admg::builder().nodes(names.iter().cloned());
    for w in names.windows(2) {
        b = b.directed(w[0].clone(), w[1].clone());
    }
    b.build().expect("chain is acyclic")
}
