//! Shared oracles and generators for the integration suites: deterministic
//! random relations and networks, boundary-avoiding direction sampling, and
//! brute-force placement search. Everything here is independent of the
//! algebra's own code paths except for the membership oracle it checks
//! against.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use scsp::angle::Angle;
use scsp::network::Network;
use scsp::relation::{Arc, Point, Relation};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ang(n: i64, d: i64) -> Angle {
    Angle::ratio(n, d)
}

/// Random angle on the grid of `denom`-ths of a half-turn.
pub fn random_angle(r: &mut ChaCha8Rng, denom: i64) -> Angle {
    Angle::ratio(r.gen_range(0..2 * denom), denom)
}

/// Random basic relation on the angle grid: mostly proper sectors, sometimes
/// a ray or the equality relation.
pub fn random_basic_relation(r: &mut ChaCha8Rng, denom: i64) -> Relation {
    match r.gen_range(0..10) {
        0 => Relation::eq_only(),
        1 => {
            let at = random_angle(r, denom);
            if r.gen_bool(0.5) {
                // Closed ray including the vertex.
                Relation::from_basic(at.clone(), true, at, true).unwrap()
            } else {
                Relation::from_arc(Arc::ray(at))
            }
        }
        _ => {
            let lo = random_angle(r, denom);
            let width = r.gen_range(1..denom); // strictly under a half-turn
            let hi = lo.add_span(&Angle::ratio(width, denom).circ_sub(&Angle::zero()));
            Relation::from_basic(lo, r.gen_bool(0.5), hi, r.gen_bool(0.5)).unwrap()
        }
    }
}

/// Random (possibly disjunctive) relation: union of one to three basic parts.
pub fn random_relation(r: &mut ChaCha8Rng, denom: i64) -> Relation {
    let parts = r.gen_range(1..=3);
    let mut acc = Relation::empty();
    for _ in 0..parts {
        acc = acc.union(&random_basic_relation(r, denom));
    }
    acc
}

/// Boundary angles of the given relations (plus their ±π shifts) as floating
/// half-turns, for boundary-avoiding sampling.
pub fn boundary_set(rels: &[&Relation]) -> Vec<f64> {
    let mut out = Vec::new();
    for rel in rels {
        for b in rel.boundary_angles() {
            let v = b.to_f64_half_turns();
            out.push(v);
            out.push((v + 1.0) % 2.0);
        }
    }
    out
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0);
    d.min(2.0 - d)
}

/// Uniform direction in half-turns staying at least `margin` away from every
/// listed boundary.
pub fn sample_direction_avoiding(r: &mut ChaCha8Rng, avoid: &[f64], margin: f64) -> f64 {
    loop {
        let theta = r.gen_range(0.0..2.0);
        if avoid.iter().all(|b| circular_distance(theta, *b) >= margin) {
            return theta;
        }
    }
}

/// Point pair whose first point sits at direction `theta` (half-turns) from
/// the second.
pub fn pair_at_direction(r: &mut ChaCha8Rng, theta: f64) -> (Point, Point) {
    let y = Point::new(r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0));
    let rad = r.gen_range(0.2..5.0);
    let t = theta * std::f64::consts::PI;
    (Point::new(y.x + rad * t.cos(), y.y + rad * t.sin()), y)
}

/// Direction strictly inside some arc of the relation (margin-separated from
/// its bounds); rays yield their exact direction. `None` for direction-free
/// relations.
pub fn direction_inside(r: &mut ChaCha8Rng, rel: &Relation, margin: f64) -> Option<f64> {
    if rel.arcs().is_empty() {
        return None;
    }
    for _ in 0..64 {
        let arc = &rel.arcs()[r.gen_range(0..rel.arcs().len())];
        let lo = arc.lo().to_f64_half_turns();
        let span = arc.span().to_f64_half_turns();
        if arc.is_ray() {
            return Some(lo);
        }
        let m = margin.min(span / 4.0);
        let theta = lo + r.gen_range(m..span - m);
        return Some(theta.rem_euclid(2.0));
    }
    None
}

/// Exhaustive placement search on the integer grid `[-range, range]²` for
/// every non-origin variable (origin fixed at (0, 0)). Only sensible for
/// networks with at most four variables.
pub fn grid_oracle(net: &Network, range: i64) -> Option<Vec<Point>> {
    let n = net.num_vars();
    let side = (2 * range + 1) as usize;
    let cells = side * side;
    let free = n - 1;
    assert!(
        free <= 3,
        "grid oracle is exponential in the variable count"
    );
    let evals: Vec<Vec<_>> = (0..n)
        .map(|i| (0..n).map(|j| net.label(i, j).member_eval()).collect())
        .collect();
    let total = cells.pow(free as u32);
    let mut placement = vec![Point::new(0.0, 0.0); n];
    'outer: for idx in 0..total {
        let mut rest = idx;
        for v in 0..free {
            let cell = rest % cells;
            rest /= cells;
            let x = (cell % side) as i64 - range;
            let y = (cell / side) as i64 - range;
            placement[v + 1] = Point::new(x as f64, y as f64);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if !evals[i][j].member(placement[i], placement[j]) {
                    continue 'outer;
                }
            }
        }
        return Some(placement);
    }
    None
}

/// Randomized placement search: random boxes, half-integer snapping, and a
/// few structured candidates. A miss proves nothing.
pub fn random_placement_oracle(
    net: &Network,
    r: &mut ChaCha8Rng,
    tries: usize,
) -> Option<Vec<Point>> {
    let n = net.num_vars();
    let evals: Vec<Vec<_>> = (0..n)
        .map(|i| (0..n).map(|j| net.label(i, j).member_eval()).collect())
        .collect();
    let check = |placement: &[Point]| -> bool {
        for i in 0..n {
            for j in (i + 1)..n {
                if !evals[i][j].member(placement[i], placement[j]) {
                    return false;
                }
            }
        }
        true
    };
    let all_equal = vec![Point::new(0.0, 0.0); n];
    if check(&all_equal) {
        return Some(all_equal);
    }
    let mut placement = vec![Point::new(0.0, 0.0); n];
    for t in 0..tries {
        for p in placement.iter_mut().skip(1) {
            let (x, y): (f64, f64) = (r.gen_range(-4.0..4.0), r.gen_range(-4.0..4.0));
            *p = if t % 3 == 0 {
                Point::new((x * 2.0).round() / 2.0, (y * 2.0).round() / 2.0)
            } else {
                Point::new(x, y)
            };
        }
        if check(&placement) {
            return Some(placement);
        }
    }
    None
}

/// Consistent-by-construction instance: random distinct points, with each
/// chosen edge labelled by a sector bracketing the true direction on the
/// 1/24-half-turn grid (margin at least 1/24), optionally widened. Returns
/// the network and the ground placement (origin included at index 0).
pub fn ground_truth_instance(
    r: &mut ChaCha8Rng,
    n: usize,
    edge_prob: f64,
) -> (Network, Vec<Point>) {
    let mut points = vec![Point::new(0.0, 0.0)];
    while points.len() < n {
        let cand = Point::new(r.gen_range(-4.0..4.0), r.gen_range(-4.0..4.0));
        if points
            .iter()
            .all(|p| ((p.x - cand.x).powi(2) + (p.y - cand.y).powi(2)).sqrt() > 0.5)
        {
            points.push(cand);
        }
    }
    let mut net = Network::new(n).unwrap();
    for i in 1..n {
        for j in 0..i {
            // Connect consecutive variables always, other pairs by chance.
            let forced = j + 1 == i;
            if !forced && !r.gen_bool(edge_prob) {
                continue;
            }
            let rel = bracketing_sector(r, points[i], points[j]);
            net.add_constraint(i, j, &rel).unwrap();
        }
    }
    (net, points)
}

/// Sector on the 1/24 grid that brackets the direction from `x` to root `y`
/// with at least 1/24 half-turn of margin on each side.
pub fn bracketing_sector(r: &mut ChaCha8Rng, x: Point, y: Point) -> Relation {
    let theta = (x.y - y.y).atan2(x.x - y.x) / std::f64::consts::PI;
    let k = (theta.rem_euclid(2.0) * 24.0).floor() as i64;
    let widen = r.gen_range(0..=2);
    let lo = Angle::ratio(k - 1 - widen, 24);
    let hi = Angle::ratio(k + 2 + widen, 24);
    Relation::from_basic(lo, r.gen_bool(0.5), hi, r.gen_bool(0.5)).unwrap()
}

/// Random basic network: every label universal, equality, a ray, or a proper
/// sector. May or may not be consistent.
pub fn random_bsp(r: &mut ChaCha8Rng, n: usize, denom: i64) -> Network {
    let mut net = Network::new(n).unwrap();
    for i in 0..n {
        for j in (i + 1)..n {
            if r.gen_bool(0.3) {
                continue; // leave universal
            }
            let rel = random_basic_relation(r, denom);
            net.add_constraint(i, j, &rel).unwrap();
        }
    }
    net
}
