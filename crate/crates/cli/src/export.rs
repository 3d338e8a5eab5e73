//! Static exports of a complex. Coordinates are exact decimals: every
//! dyadic rational has a terminating expansion.

use std::fmt::Write as _;

use rsponge::{DyadicComplex, DyadicRational};

fn coord(v: i64, level: u32) -> String {
    DyadicRational::new(v, level).to_decimal_string()
}

/// One line per cube: minimum corner and edge length.
pub fn voxels(x: &DyadicComplex) -> String {
    let l = x.level();
    let mut out = format!("VOXELS 1\nlevel {l}\ncount {}\nedge {}\n", x.len(), coord(1, l));
    for [a, b, c] in x.coords() {
        let _ = writeln!(out, "{} {} {}", coord(*a, l), coord(*b, l), coord(*c, l));
    }
    out
}

/// Faces as `(axis, outward sign)`.
const FACES: [(usize, i64); 6] = [(0, -1), (0, 1), (1, -1), (1, 1), (2, -1), (2, 1)];

/// Corners of the face of the unit cell at `c` normal to `axis` on side
/// `sign`, counter-clockwise seen from outside.
fn face_corners(c: [i64; 3], axis: usize, sign: i64) -> [[i64; 3]; 4] {
    let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
    let mut base = c;
    if sign > 0 {
        base[axis] += 1;
    }
    let at = |du: i64, dv: i64| {
        let mut p = base;
        p[u] += du;
        p[v] += dv;
        p
    };
    if sign > 0 {
        [at(0, 0), at(1, 0), at(1, 1), at(0, 1)]
    } else {
        [at(0, 0), at(0, 1), at(1, 1), at(1, 0)]
    }
}

/// ASCII STL of the boundary: each cube face not shared with another cube
/// of the complex becomes two triangles.
pub fn stl(x: &DyadicComplex) -> String {
    let l = x.level();
    let mut out = String::from("solid rsponge\n");
    for &c in x.coords() {
        for (axis, sign) in FACES {
            let mut n = c;
            n[axis] += sign;
            if x.contains_coords(&n) {
                continue;
            }
            let q = face_corners(c, axis, sign);
            let mut normal = [0i64; 3];
            normal[axis] = sign;
            for tri in [[q[0], q[1], q[2]], [q[0], q[2], q[3]]] {
                let _ = writeln!(out, "  facet normal {} {} {}", normal[0], normal[1], normal[2]);
                out.push_str("    outer loop\n");
                for p in tri {
                    let _ = writeln!(out, "      vertex {} {} {}", coord(p[0], l), coord(p[1], l), coord(p[2], l));
                }
                out.push_str("    endloop\n  endfacet\n");
            }
        }
    }
    out.push_str("endsolid rsponge\n");
    out
}
