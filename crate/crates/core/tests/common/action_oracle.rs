//! Brute-force oracles for homotopy S-actions, straight from the definitions.

use std::collections::BTreeSet;

use transfer_core::actions::{HomotopySAction, Node};
use transfer_core::groups::Elem;
use transfer_core::rational::{Dist, Q};

/// F_g by enumerating (r, s, t_j) with rs = g.
pub fn f_set(a: &HomotopySAction, g: &Elem) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    for r in &a.s.elements {
        for s in &a.s.elements {
            if a.group.mul(r, s) != *g {
                continue;
            }
            for frame in &a.homotopies[&(r.clone(), s.clone())] {
                out.insert(frame.images.clone());
            }
        }
    }
    out
}

/// One step of the definition: all (h a⁻¹ b, x′) with f(z) = f̃(x′).
fn moves(a: &HomotopySAction, (h, z): &Node) -> BTreeSet<Node> {
    let mut out = BTreeSet::new();
    for ea in &a.s.elements {
        for eb in &a.s.elements {
            let h2 = a.group.mul(&a.group.mul(h, &a.group.inv(ea)), eb);
            for f in f_set(a, ea) {
                for ft in f_set(a, eb) {
                    for x2 in 0..a.npoints() {
                        if f[*z] == ft[x2] {
                            out.insert((h2.clone(), x2));
                        }
                    }
                }
            }
        }
    }
    out
}

/// S^n(g, x): chains of exactly n steps.
pub fn orbit(a: &HomotopySAction, n: usize, p: &Node) -> BTreeSet<Node> {
    let mut cur = BTreeSet::from([p.clone()]);
    for _ in 0..n {
        cur = cur.iter().flat_map(|q| moves(a, q)).collect();
    }
    cur
}

/// Infimum of n + Σ Λ·d(x_i, z_i) over chains with at most `n_max` moves.
pub fn chain_min(a: &HomotopySAction, lambda: Q, p: &Node, q: &Node, n_max: usize) -> Dist {
    fn go(a: &HomotopySAction, lambda: Q, at: &Node, q: &Node, left: usize, spent: Q, best: &mut Dist) {
        // fiber step x_i → z_i
        for z in 0..a.npoints() {
            let c = spent + lambda * a.space.d(at.1, z);
            let zn = (at.0.clone(), z);
            if zn == *q && Dist::Finite(c) < *best {
                *best = Dist::Finite(c);
            }
            if left > 0 {
                for nx in moves(a, &zn) {
                    go(a, lambda, &nx, q, left - 1, c + Q::from_integer(1), best);
                }
            }
        }
    }
    let mut best = Dist::Infinite;
    go(a, lambda, p, q, n_max, Q::default(), &mut best);
    best
}

/// All-pairs shortest paths on G × X for a finite group.
pub fn floyd(a: &HomotopySAction, lambda: Q) -> (Vec<Node>, Vec<Vec<Dist>>) {
    let elems = a.group.elements().unwrap();
    let pts: Vec<Node> = elems.iter().flat_map(|g| (0..a.npoints()).map(move |x| (g.clone(), x))).collect();
    let n = pts.len();
    let idx = |p: &Node| pts.iter().position(|q| q == p).unwrap();
    let mut d = vec![vec![Dist::Infinite; n]; n];
    for i in 0..n {
        for j in 0..n {
            if pts[i].0 == pts[j].0 {
                d[i][j] = Dist::Finite(lambda * a.space.d(pts[i].1, pts[j].1));
            }
        }
        for m in moves(a, &pts[i]) {
            let j = idx(&m);
            d[i][j] = d[i][j].min(Dist::Finite(Q::from_integer(1)));
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k].plus(d[k][j]);
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    (pts, d)
}
