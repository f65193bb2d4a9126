//! Controlled N-domination data (K, i, p, H) of a finite metric space.

use serde::{Deserialize, Serialize};

use crate::control::{ControlSpace, PointMap};
use crate::rational::Q;
use crate::simplicial::{PointInComplex, SimplicialComplex};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationData {
    pub space: ControlSpace,
    pub complex: SimplicialComplex,
    /// i: X → |K|.
    pub i: Vec<PointInComplex>,
    /// p on the vertices of K.
    pub p: Vec<usize>,
    /// Grid frames of a homotopy from p∘i to id_X.
    pub track: Vec<PointMap>,
    #[serde(with = "crate::rational::qser")]
    pub epsilon: Q,
    pub n: usize,
}

impl DominationData {
    /// p∘i on points: p applied to the dominant vertex of i(x).
    pub fn p_after_i(&self) -> PointMap {
        PointMap { images: self.i.iter().map(|c| self.p[c.dominant_vertex()]).collect(), target_len: self.space.len() }
    }

    /// Diameter of the track {H(x, t)} of each point.
    pub fn track_diameters(&self) -> Vec<Q> {
        (0..self.space.len())
            .map(|x| {
                let pts: Vec<usize> = self.track.iter().map(|f| f.apply(x)).collect();
                let mut d = Q::default();
                for &a in &pts {
                    for &b in &pts {
                        d = d.max(self.space.d(a, b));
                    }
                }
                d
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub violations: Vec<String>,
    #[serde(with = "crate::rational::qvec")]
    pub track_diameters: Vec<Q>,
}

impl DominationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_domination(dd: &DominationData) -> DominationReport {
    let mut v = Vec::new();
    let n = dd.space.len();
    if dd.complex.dim() > dd.n as i32 {
        v.push(format!("dim K = {} exceeds N = {}", dd.complex.dim(), dd.n));
    }
    if dd.i.len() != n {
        v.push("i is not defined on every point".to_string());
    }
    let fp = dd.complex.fingerprint();
    for (x, c) in dd.i.iter().enumerate() {
        if c.complex != fp || PointInComplex::new(&dd.complex, c.coords.clone()).is_err() {
            v.push(format!("i(x{x}) is not a point of K"));
        }
    }
    if dd.p.len() != dd.complex.nvertices() || dd.p.iter().any(|&y| y >= n) {
        v.push("p is not a map from the vertices of K to X".to_string());
    }
    if dd.track.is_empty() || dd.track.iter().any(|f| f.images.len() != n || f.images.iter().any(|&y| y >= n)) {
        v.push("track frames are malformed".to_string());
        return DominationReport { violations: v, track_diameters: Vec::new() };
    }
    if !v.is_empty() {
        return DominationReport { violations: v, track_diameters: Vec::new() };
    }
    if dd.track[0] != dd.p_after_i() {
        v.push("track does not start at p∘i".to_string());
    }
    if *dd.track.last().unwrap() != PointMap::identity(n) {
        v.push("track does not end at the identity".to_string());
    }
    let diams = dd.track_diameters();
    for (x, d) in diams.iter().enumerate() {
        if *d > dd.epsilon {
            v.push(format!("track of x{x} has diameter {} > ε = {}", crate::rational::fmt_q(d), crate::rational::fmt_q(&dd.epsilon)));
        }
    }
    DominationReport { violations: v, track_diameters: diams }
}
