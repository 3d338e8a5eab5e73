//! Independent oracles shared by the integration tests. Nothing here calls
//! into the search or motion code under test.

#![allow(dead_code)]

/// Axis orders in the canonical symmetry order; within one order the sign
/// pattern counts up with bit `i` negating output axis `i`.
const ORDERS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// `(A coords, symmetry index, translation in units of 2^-resolution)`.
pub type OracleWitness = ([i64; 3], usize, [i64; 3]);

fn matrix(index: usize) -> [[i64; 3]; 3] {
    let order = ORDERS[index / 8];
    let signs = index % 8;
    let mut m = [[0i64; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        row[order[i]] = if signs >> i & 1 == 1 { -1 } else { 1 };
    }
    m
}

fn mul(m: &[[i64; 3]; 3], v: [i64; 3]) -> [i64; 3] {
    [0, 1, 2].map(|i| (0..3).map(|j| m[i][j] * v[j]).sum())
}

/// Brute-force subcongruence search over a complex given as level-`level`
/// cells inside `[0,1]³`. Points are handled in units of `2^-(level+1)` so
/// cell centres are integral: a cube maps into `M` exactly when its centre
/// lands on the centre of a cell of `M`.
pub fn first_witness(level: u32, cells: &[[i64; 3]], s: u32, resolution: u32, closed: bool) -> Option<OracleWitness> {
    let centre = |c: [i64; 3]| c.map(|v| 2 * v + 1);
    let centres: std::collections::HashSet<[i64; 3]> = cells.iter().map(|&c| centre(c)).collect();
    let a_side = 1i64 << (level + 1 - s);
    let grid = 1i64 << (level + 1 - resolution);
    // x ↦ ±x + t keeps a point of [0,1] inside [0,1] only for t ∈ [-1, 2]
    let reach = 1i64 << resolution;
    let n_a = 1i64 << s;
    for ax in 0..n_a {
        for ay in 0..n_a {
            for az in 0..n_a {
                let lo = [ax, ay, az].map(|v| v * a_side);
                let hi = lo.map(|v| v + a_side);
                let part: Vec<[i64; 3]> = cells
                    .iter()
                    .map(|&c| centre(c))
                    .filter(|p| (0..3).all(|i| lo[i] < p[i] && p[i] < hi[i]))
                    .collect();
                if part.is_empty() {
                    continue;
                }
                for g in 0..48 {
                    let m = matrix(g);
                    for tz in -reach..=2 * reach {
                        for ty in -reach..=2 * reach {
                            for tx in -reach..=2 * reach {
                                if g == 0 && (tx, ty, tz) == (0, 0, 0) {
                                    continue;
                                }
                                let t = [tx, ty, tz].map(|v| v * grid);
                                // image box of A from its eight corners
                                let mut ilo = [i64::MAX; 3];
                                let mut ihi = [i64::MIN; 3];
                                for k in 0..8 {
                                    let corner = [0, 1, 2].map(|i| if k >> i & 1 == 1 { hi[i] } else { lo[i] });
                                    let p = mul(&m, corner);
                                    for i in 0..3 {
                                        ilo[i] = ilo[i].min(p[i] + t[i]);
                                        ihi[i] = ihi[i].max(p[i] + t[i]);
                                    }
                                }
                                let apart = (0..3).any(|i| {
                                    if closed {
                                        ihi[i] < lo[i] || hi[i] < ilo[i]
                                    } else {
                                        ihi[i] <= lo[i] || hi[i] <= ilo[i]
                                    }
                                });
                                if !apart {
                                    continue;
                                }
                                let inside = part.iter().all(|&p| {
                                    let q = mul(&m, p);
                                    centres.contains(&[q[0] + t[0], q[1] + t[1], q[2] + t[2]])
                                });
                                if inside {
                                    return Some(([ax, ay, az], g, [tx, ty, tz]));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    None
}
