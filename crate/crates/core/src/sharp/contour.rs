//! Marching squares.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{Curve, Point};
use crate::grid::Field;

/// Level set `{f = level}` as polylines, longest first.
///
/// Nodes with `f >= level` count as above. Crossings are placed by linear
/// interpolation along cell edges; saddle cells are resolved with the cell
/// average. Pieces that reach the box boundary are open curves, the rest
/// closed.
pub fn extract_interface(f: &Field, level: f64) -> Result<Vec<Curve>> {
    let grid = *f.grid();
    let n = grid.n;
    let val = |i: usize, j: usize| f.at(i, j);
    let above = |i: usize, j: usize| val(i, j) >= level;

    // Edge ids: 2 * node for the edge to the right, 2 * node + 1 upwards.
    let edge_point = |id: usize| -> Point {
        let node = id / 2;
        let (i, j) = (node % n, node / n);
        let (i2, j2) = if id % 2 == 0 { (i + 1, j) } else { (i, j + 1) };
        let (a, b) = (val(i, j), val(i2, j2));
        let t = ((level - a) / (b - a)).clamp(0.0, 1.0);
        let (p, q) = (grid.point(i, j), grid.point(i2, j2));
        [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
    };

    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut link = |a: usize, b: usize| {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    };
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            let bottom = 2 * (j * n + i);
            let top = 2 * ((j + 1) * n + i);
            let left = 2 * (j * n + i) + 1;
            let right = 2 * (j * n + i + 1) + 1;
            let case = (above(i, j) as u8)
                | (above(i + 1, j) as u8) << 1
                | (above(i + 1, j + 1) as u8) << 2
                | (above(i, j + 1) as u8) << 3;
            match case {
                0 | 15 => {}
                1 | 14 => link(left, bottom),
                2 | 13 => link(bottom, right),
                3 | 12 => link(left, right),
                4 | 11 => link(right, top),
                6 | 9 => link(bottom, top),
                7 | 8 => link(left, top),
                5 | 10 => {
                    let centre = 0.25 * (val(i, j) + val(i + 1, j) + val(i + 1, j + 1) + val(i, j + 1));
                    // Corners 0 and 2 above (case 5) or 1 and 3 above (case 10).
                    let join_02 = (centre >= level) == (case == 5);
                    if join_02 {
                        link(left, top);
                        link(bottom, right);
                    } else {
                        link(left, bottom);
                        link(right, top);
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    if adj.is_empty() {
        return Err(Error::NoCrossing { level });
    }

    let mut keys: Vec<usize> = adj.keys().copied().collect();
    keys.sort_unstable();
    let mut used: HashMap<usize, bool> = keys.iter().map(|&k| (k, false)).collect();
    let mut chains: Vec<(Vec<usize>, bool)> = Vec::new();
    let walk = |start: usize, used: &mut HashMap<usize, bool>| -> (Vec<usize>, bool) {
        let mut chain = vec![start];
        used.insert(start, true);
        let mut prev = usize::MAX;
        let mut cur = start;
        loop {
            let next = adj[&cur].iter().copied().find(|&e| e != prev && !used[&e]);
            match next {
                Some(e) => {
                    used.insert(e, true);
                    chain.push(e);
                    prev = cur;
                    cur = e;
                }
                None => {
                    let closed = chain.len() > 2 && adj[&cur].contains(&start);
                    return (chain, closed);
                }
            }
        }
    };
    for &k in &keys {
        if !used[&k] && adj[&k].len() == 1 {
            chains.push(walk(k, &mut used));
        }
    }
    for &k in &keys {
        if !used[&k] {
            chains.push(walk(k, &mut used));
        }
    }

    let mut curves = Vec::new();
    for (ids, closed) in chains {
        let mut pts: Vec<Point> = Vec::with_capacity(ids.len());
        for id in ids {
            let p = edge_point(id);
            if pts.last() != Some(&p) {
                pts.push(p);
            }
        }
        if closed && pts.len() > 1 && pts.first() == pts.last() {
            pts.pop();
        }
        let need = if closed { 3 } else { 2 };
        if pts.len() >= need {
            if let Ok(c) = Curve::new(pts, closed) {
                curves.push(c);
            }
        }
    }
    if curves.is_empty() {
        return Err(Error::NoCrossing { level });
    }
    curves.sort_by(|a, b| b.length().total_cmp(&a.length()));
    Ok(curves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::tf;
    use std::f64::consts::PI;

    fn hausdorff_to(curves: &[Curve], d: impl Fn(Point) -> f64) -> f64 {
        curves
            .iter()
            .flat_map(|c| c.points().iter().copied())
            .map(d)
            .fold(0.0, f64::max)
    }

    #[test]
    fn planar_step_gives_a_vertical_line() {
        let g = GridSpec::with_default_box(128).unwrap();
        let w = 4.0 * g.h();
        let phi = Field::from_fn(g, |x, _| PI * (0.5 + 0.5 * (x / w).tanh()));
        let cs = extract_interface(&phi, PI / 2.0).unwrap();
        assert_eq!(cs.len(), 1);
        assert!(!cs[0].is_closed());
        assert!(hausdorff_to(&cs, |p| p[0].abs()) <= 2.0 * g.h());
        assert!((cs[0].length() - 2.0 * g.half_width).abs() < 1e-9);
    }

    #[test]
    fn radial_step_gives_a_circle() {
        let g = GridSpec::with_default_box(256).unwrap();
        let r = tf::mass_radius(0.5).unwrap();
        let w = 4.0 * g.h();
        let phi = Field::from_fn(g, |x, y| PI * (0.5 + 0.5 * ((x.hypot(y) - r) / w).tanh()));
        let cs = extract_interface(&phi, PI / 2.0).unwrap();
        assert_eq!(cs.len(), 1);
        assert!(cs[0].is_closed());
        assert!(hausdorff_to(&cs, |p| (p[0].hypot(p[1]) - r).abs()) <= 2.0 * g.h());
        let wl = tf::weighted_length(&cs[0]);
        let exact = tf::circle_weighted_length(r);
        assert!((wl / exact - 1.0).abs() <= 0.02, "{wl} vs {exact}");
    }

    #[test]
    fn several_components_longest_first() {
        let g = GridSpec::with_default_box(128).unwrap();
        let f = Field::from_fn(g, |x, y| {
            let a = (x - 0.4).hypot(y) - 0.3;
            let b = (x + 0.5).hypot(y) - 0.1;
            a.min(b)
        });
        let cs = extract_interface(&f, 0.0).unwrap();
        assert_eq!(cs.len(), 2);
        assert!(cs[0].length() > cs[1].length());
        assert!(cs.iter().all(Curve::is_closed));
    }

    #[test]
    fn no_crossing_is_an_error() {
        let g = GridSpec::with_default_box(32).unwrap();
        assert!(matches!(
            extract_interface(&Field::constant(g, 1.0), 2.0),
            Err(Error::NoCrossing { .. })
        ));
    }
}
