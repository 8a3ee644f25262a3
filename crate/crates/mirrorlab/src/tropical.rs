//! The tropicalized theta function, its honeycomb tiling and the moment
//! polytope η ≥ φ(ξ). Points ξ are in std coordinates throughout.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_traits::Signed;

use crate::lattice::{enumerate_norm_ball, lambda, q, LatticeVector, MomentPoint, RationalVector2, Q};

/// φ(ξ) and every maximizer of κ(γ) + ⟨ξ, λ(γ)⟩.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropValue {
    pub value: Q,
    pub maximizers: Vec<LatticeVector>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tile {
    pub m1: i64,
    pub m2: i64,
}

impl Tile {
    pub fn new(m1: i64, m2: i64) -> Self {
        Self { m1, m2 }
    }

    pub fn vector(&self) -> LatticeVector {
        LatticeVector::new(self.m1, self.m2)
    }

    /// Center of the hexagon, M·m.
    pub fn center(&self) -> (i64, i64) {
        self.vector().std()
    }

    /// Hexagon vertices counterclockwise from the one at center + (1,0).
    pub fn vertices(&self) -> [(i64, i64); 6] {
        let (cx, cy) = self.center();
        HEX.map(|(a, b)| (cx + a, cy + b))
    }

    pub fn neighbors(&self) -> [Tile; 6] {
        ADJ.map(|(a, b)| Tile::new(self.m1 + a, self.m2 + b))
    }

    pub fn is_adjacent(&self, o: &Tile) -> bool {
        ADJ.contains(&(o.m1 - self.m1, o.m2 - self.m2))
    }
}

const HEX: [(i64, i64); 6] = [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)];

/// Differences between adjacent tiles, in the order of the hexagon edges
/// starting with the edge from vertex 0 to vertex 1.
pub const ADJ: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TileOf {
    Tile(Tile),
    Boundary(Vec<LatticeVector>),
}

/// The facet of tile m: ⟨(ξ, η), ν⟩ + α = 0 with ν = (−m1,−m2,1), α = N(m).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Facet {
    pub normal: (i64, i64, i64),
    pub offset: i64,
}

/// A line a·ξ₁ + b·ξ₂ = c.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Line {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

fn round_q(x: &Q) -> i64 {
    use num_traits::ToPrimitive;
    (x + Q::new(1.into(), 2.into())).floor().to_integer().to_i64().expect("coordinate overflow")
}

/// Value of κ(γ) + ⟨ξ, λ(γ)⟩ = ⟨ξ, n⟩ − N(n).
pub fn trop_term(xi: &RationalVector2, n: &LatticeVector) -> Q {
    &xi.a * q(n.n1) + &xi.b * q(n.n2) - q(n.norm())
}

/// φ(ξ) = max over γ of κ(γ) + ⟨ξ, λ(γ)⟩.
///
/// With m₀ = round(λξ) the reduced point ξ − M·m₀ has |·|∞ ≤ 3/2, so for
/// n = m₀ + n′ only N(n′) ≤ 12 can compete with n′ = 0; the search covers
/// N(n′) ≤ 16.
pub fn trop_phi(xi: &RationalVector2) -> TropValue {
    let lx = lambda(xi);
    let m0 = LatticeVector::new(round_q(&lx.a), round_q(&lx.b));
    let mut best: Option<Q> = None;
    let mut arg = Vec::new();
    for d in enumerate_norm_ball(&q(16)) {
        let n = m0.add(&d);
        let v = trop_term(xi, &n);
        match &best {
            Some(b) if &v < b => {}
            Some(b) if &v == b => arg.push(n),
            _ => {
                best = Some(v);
                arg = vec![n];
            }
        }
    }
    arg.sort();
    TropValue { value: best.expect("nonempty ball"), maximizers: arg }
}

pub fn tile_of(xi: &RationalVector2) -> TileOf {
    let t = trop_phi(xi);
    if t.maximizers.len() == 1 {
        let m = t.maximizers[0];
        TileOf::Tile(Tile::new(m.n1, m.n2))
    } else {
        TileOf::Boundary(t.maximizers)
    }
}

/// The six lines bounding the tile: ξ₁ = 2m₁+m₂ ± 1, ξ₂ = m₁+2m₂ ± 1,
/// ξ₁ − ξ₂ = m₁ − m₂ ± 1.
pub fn tile_edges(t: &Tile) -> [Line; 6] {
    let (c1, c2) = t.center();
    let d = t.m1 - t.m2;
    [
        Line { a: 1, b: 0, c: c1 + 1 },
        Line { a: 1, b: 0, c: c1 - 1 },
        Line { a: 0, b: 1, c: c2 + 1 },
        Line { a: 0, b: 1, c: c2 - 1 },
        Line { a: 1, b: -1, c: d + 1 },
        Line { a: 1, b: -1, c: d - 1 },
    ]
}

/// Strictly inside the hexagon cut out by [`tile_edges`].
pub fn inside_edges(t: &Tile, xi: &RationalVector2) -> bool {
    let (c1, c2) = t.center();
    let one = q(1);
    (&xi.a - q(c1)).abs() < one
        && (&xi.b - q(c2)).abs() < one
        && (&xi.a - &xi.b - q(t.m1 - t.m2)).abs() < one
}

pub fn facet(t: &Tile) -> Facet {
    Facet { normal: (-t.m1, -t.m2, 1), offset: t.vector().norm() }
}

/// η ≥ φ(ξ), exactly.
pub fn polytope_contains(p: &MomentPoint) -> bool {
    p.eta >= trop_phi(&p.xi()).value
}

/// Strictly interior: η > φ(ξ).
pub fn polytope_interior(p: &MomentPoint) -> bool {
    p.eta > trop_phi(&p.xi()).value
}

/// Tiles whose closed hexagon meets the window [x0,x1]×[y0,y1].
pub fn tiles_in_window(w: &[Q; 4]) -> Vec<Tile> {
    let lo = |x: &Q| x.floor().to_integer();
    let hi = |x: &Q| x.ceil().to_integer();
    use num_traits::ToPrimitive;
    let (x0, y0) = (lo(&w[0]).to_i64().unwrap() - 1, lo(&w[1]).to_i64().unwrap() - 1);
    let (x1, y1) = (hi(&w[2]).to_i64().unwrap() + 1, hi(&w[3]).to_i64().unwrap() + 1);
    let mut out = Vec::new();
    // Centers M·m lie within distance 1 (sup norm) of any point of the tile.
    let r = (x1 - x0).abs().max((y1 - y0).abs()) + x0.abs().max(x1.abs()) + y0.abs().max(y1.abs()) + 2;
    for m1 in -r..=r {
        for m2 in -r..=r {
            let t = Tile::new(m1, m2);
            let vs = t.vertices();
            let (minx, maxx) = (vs.iter().map(|v| v.0).min().unwrap(), vs.iter().map(|v| v.0).max().unwrap());
            let (miny, maxy) = (vs.iter().map(|v| v.1).min().unwrap(), vs.iter().map(|v| v.1).max().unwrap());
            if q(maxx) >= w[0] && q(minx) <= w[2] && q(maxy) >= w[1] && q(miny) <= w[3] {
                out.push(t);
            }
        }
    }
    out.sort_by_key(|t| (t.m1, t.m2));
    out
}

/// SVG of the honeycomb in the window. Coordinates are scaled by 100,
/// rounded to integers and flipped so ξ₂ points up. Trivalent vertices
/// inside the window are marked.
pub fn render_svg(w: &[Q; 4]) -> String {
    let sx = |x: &Q| round_q(&((x - &w[0]) * q(100)));
    let sy = |y: &Q| round_q(&((&w[3] - y) * q(100)));
    let (width, height) = (sx(&w[2]), round_q(&((&w[3] - &w[1]) * q(100))));
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    let _ = writeln!(s, "<rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"white\"/>");
    let tiles = tiles_in_window(w);
    let mut verts = BTreeSet::new();
    for t in &tiles {
        let pts: Vec<String> = t
            .vertices()
            .iter()
            .map(|&(a, b)| format!("{},{}", sx(&q(a)), sy(&q(b))))
            .collect();
        let _ = writeln!(
            s,
            "<polygon points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"2\" data-tile=\"{},{}\"/>",
            pts.join(" "),
            t.m1,
            t.m2
        );
        let (cx, cy) = t.center();
        if q(cx) >= w[0] && q(cx) <= w[2] && q(cy) >= w[1] && q(cy) <= w[3] {
            let _ = writeln!(
                s,
                "<text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">({},{})</text>",
                sx(&q(cx)),
                sy(&q(cy)) + 5,
                t.m1,
                t.m2
            );
        }
        for v in t.vertices() {
            if q(v.0) >= w[0] && q(v.0) <= w[2] && q(v.1) >= w[1] && q(v.1) <= w[3] {
                verts.insert(v);
            }
        }
    }
    for (a, b) in verts {
        let _ = writeln!(s, "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"red\"/>", sx(&q(a)), sy(&q(b)));
    }
    s.push_str("</svg>\n");
    s
}

/// CSV rows `m1,m2,nu1,nu2,nu3,alpha` for all tiles with N(m) ≤ radius.
pub fn facet_csv(radius: &Q) -> String {
    let mut s = String::from("m1,m2,nu1,nu2,nu3,alpha\n");
    for m in enumerate_norm_ball(radius) {
        let f = facet(&Tile::new(m.n1, m.n2));
        let _ = writeln!(s, "{},{},{},{},{},{}", m.n1, m.n2, f.normal.0, f.normal.1, f.normal.2, f.offset);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(a: i64, b: i64) -> RationalVector2 {
        RationalVector2::ints(a, b)
    }

    #[test]
    fn phi_examples() {
        let t = trop_phi(&v(0, 0));
        assert_eq!((t.value, t.maximizers), (q(0), vec![LatticeVector::ZERO]));
        assert_eq!(trop_phi(&v(2, 1)).value, q(1));
        let t = trop_phi(&v(1, 1));
        assert_eq!(t.value, q(0));
        assert_eq!(t.maximizers, vec![LatticeVector::new(0, 0), LatticeVector::new(0, 1), LatticeVector::new(1, 0)]);
    }

    #[test]
    fn tile_examples() {
        assert_eq!(tile_of(&v(0, 0)), TileOf::Tile(Tile::new(0, 0)));
        match tile_of(&v(1, 0)) {
            TileOf::Boundary(m) => assert_eq!(m.len(), 3),
            _ => panic!("expected a vertex"),
        }
        assert_eq!(tile_of(&v(10, 5)), TileOf::Tile(Tile::new(5, 0)));
    }

    #[test]
    fn facets() {
        assert_eq!(facet(&Tile::new(1, 0)), Facet { normal: (-1, 0, 1), offset: 1 });
        assert_eq!(facet(&Tile::new(1, 1)).offset, 3);
        assert_eq!(facet_csv(&q(1)).lines().count(), 8);
    }

    #[test]
    fn membership() {
        assert!(polytope_contains(&MomentPoint::new(q(0), q(0), q(0))));
        assert!(!polytope_contains(&MomentPoint::new(q(0), q(0), q(-1))));
    }
}
