//! Real-root counting by sign changes on a refined grid.
//!
//! `[-1, 1]` is scanned with the polynomial itself and `|x| >= 1` through the
//! reversed polynomial `t^d p(1/t)` on `1/R <= |t| <= 1`, where `R` is the
//! Cauchy root bound, so no evaluation ever leaves the unit interval. Grid
//! nodes are Chebyshev–Lobatto points, dense near `+-1` where real zeros of
//! random polynomials concentrate.
//!
//! A cell is trusted when the polynomial sign is certified at both ends and
//! neither `p'` nor `p''` changes sign across it (so `p` is monotone inside).
//! Other cells are subdivided; at the deepest level the critical points of
//! `p` inside the cell are located by bisection and `p` is sampled there.

use crate::numerics::{compensated_horner, horner};

const SUBDIVISIONS: usize = 4;
const BISECTION_STEPS: usize = 200;

struct Poly {
    p: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl Poly {
    fn new(p: Vec<f64>) -> Self {
        let d1 = derivative(&p);
        let d2 = derivative(&d1);
        Self { p, d1, d2 }
    }

    fn node(&self, x: f64) -> Node {
        let e = compensated_horner(&self.p, x);
        Node {
            x,
            p: e.value,
            certain: e.sign_is_certain(),
            d1: horner(&self.d1, x),
            d2: horner(&self.d2, x),
        }
    }
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &a)| k as f64 * a)
        .collect()
}

#[derive(Clone, Copy)]
struct Node {
    x: f64,
    p: f64,
    certain: bool,
    d1: f64,
    d2: f64,
}

#[inline]
fn positive(v: f64) -> bool {
    // exact zeros are grouped with the positive side so every crossing is
    // counted once
    v >= 0.0
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let sa = positive(f(a));
    for _ in 0..BISECTION_STEPS {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if positive(f(m)) == sa {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub(crate) struct IntervalCount {
    pub roots: usize,
    /// A sign could not be certified even after full refinement.
    pub uncertain: bool,
}

impl std::ops::AddAssign for IntervalCount {
    fn add_assign(&mut self, rhs: Self) {
        self.roots += rhs.roots;
        self.uncertain |= rhs.uncertain;
    }
}

fn cell(poly: &Poly, u: Node, v: Node, depth: usize, max_depth: usize) -> IntervalCount {
    let sign_change = usize::from(positive(u.p) != positive(v.p));
    let certain = u.certain && v.certain;
    let monotone = positive(u.d1) == positive(v.d1) && positive(u.d2) == positive(v.d2);
    if certain && monotone {
        return IntervalCount {
            roots: sign_change,
            uncertain: false,
        };
    }
    if depth < max_depth {
        let mut total = IntervalCount::default();
        let mut left = u;
        for k in 1..=SUBDIVISIONS {
            let right = if k == SUBDIVISIONS {
                v
            } else {
                poly.node(u.x + (v.x - u.x) * k as f64 / SUBDIVISIONS as f64)
            };
            total += cell(poly, left, right, depth + 1, max_depth);
            left = right;
        }
        return total;
    }

    // Leaf: split at the inflection point (if p'' changes sign) and at every
    // critical point found in the resulting pieces, then count sign changes.
    let mut pieces = vec![(u.x, v.x)];
    if positive(u.d2) != positive(v.d2) {
        let w = bisect(|x| horner(&poly.d2, x), u.x, v.x);
        pieces = vec![(u.x, w), (w, v.x)];
    }
    let mut xs = vec![u.x];
    for (a, b) in pieces {
        let (da, db) = (horner(&poly.d1, a), horner(&poly.d1, b));
        if positive(da) != positive(db) {
            xs.push(bisect(|x| horner(&poly.d1, x), a, b));
        }
    }
    xs.push(v.x);
    let mut uncertain = !certain;
    let mut prev = positive(u.p);
    let mut roots = 0;
    for &x in &xs[1..xs.len() - 1] {
        let e = compensated_horner(&poly.p, x);
        uncertain |= !e.sign_is_certain();
        let s = positive(e.value);
        roots += usize::from(s != prev);
        prev = s;
    }
    roots += usize::from(positive(v.p) != prev);
    IntervalCount { roots, uncertain }
}

fn scan(poly: &Poly, lo: f64, hi: f64, cells: usize, max_depth: usize) -> IntervalCount {
    let mut total = IntervalCount::default();
    let width = hi - lo;
    let mut prev = poly.node(lo);
    for i in 1..=cells {
        let x = if i == cells {
            hi
        } else {
            lo + width * 0.5 * (1.0 - (std::f64::consts::PI * i as f64 / cells as f64).cos())
        };
        let node = poly.node(x);
        total += cell(poly, prev, node, 0, max_depth);
        prev = node;
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct GridCount {
    pub negative: usize,
    pub positive: usize,
    pub uncertain: bool,
}

/// Counts real roots of `coeffs` (ascending, nonzero leading and constant
/// coefficient) split by sign.
pub(crate) fn count(coeffs: &[f64], refine: usize) -> GridCount {
    let d = coeffs.len() - 1;
    let lead = coeffs[d].abs();
    let max_lower = coeffs[..d].iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let bound = 1.0 + max_lower / lead;
    let t_min = 1.0 / bound;
    let cells = (2 * d).max(32);

    let forward = Poly::new(coeffs.to_vec());
    let reversed: Vec<f64> = coeffs.iter().rev().copied().collect();
    // on t < 0, |t|^d p(1/t) carries the sign of p itself, so a zero landing
    // exactly on x = -1 is classified the same way by both scans
    let flip = if d % 2 == 1 { -1.0 } else { 1.0 };
    let reversed_neg = Poly::new(reversed.iter().map(|a| flip * a).collect());
    let reversed = Poly::new(reversed);

    let mut neg = scan(&forward, -1.0, 0.0, cells, refine);
    let mut pos = scan(&forward, 0.0, 1.0, cells, refine);
    neg += scan(&reversed_neg, -1.0, -t_min, cells, refine);
    pos += scan(&reversed, t_min, 1.0, cells, refine);
    GridCount {
        negative: neg.roots,
        positive: pos.roots,
        uncertain: neg.uncertain || pos.uncertain,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_roots(roots: &[f64]) -> Vec<f64> {
        let mut c = vec![1.0];
        for &r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= r * ci;
            }
            c = next;
        }
        c
    }

    #[test]
    fn counts_simple_products() {
        let g = count(&from_roots(&[2.0, 3.0]), 3);
        assert_eq!((g.negative, g.positive), (0, 2));
        let g = count(&from_roots(&[-5.0, -0.5, 0.25, 7.0]), 3);
        assert_eq!((g.negative, g.positive), (2, 2));
        let g = count(&[1.0, 0.0, 1.0], 3);
        assert_eq!((g.negative, g.positive), (0, 0));
    }

    #[test]
    fn resolves_close_pair_inside_one_cell() {
        // roots 0.5 and 0.5 + 1e-7 plus a complex pair
        let mut c = from_roots(&[0.5, 0.5 + 1e-7]);
        // multiply by x^2 + 4
        let mut next = vec![0.0; c.len() + 2];
        for (i, &ci) in c.iter().enumerate() {
            next[i] += 4.0 * ci;
            next[i + 2] += ci;
        }
        c = next;
        let g = count(&c, 3);
        assert_eq!((g.negative, g.positive), (0, 2));
    }

    #[test]
    fn roots_exactly_on_the_unit_circle() {
        // (x + 1)(x - 1)(x - 3) and (x + 1)(x - 2)
        let g = count(&from_roots(&[-1.0, 1.0, 3.0]), 3);
        assert_eq!((g.negative, g.positive), (1, 2));
        let g = count(&from_roots(&[-1.0, 2.0]), 3);
        assert_eq!((g.negative, g.positive), (1, 1));
        let g = count(&from_roots(&[-1.0, -1.5, 2.0, 0.5]), 3);
        assert_eq!((g.negative, g.positive), (2, 2));
    }

    #[test]
    fn large_roots_via_reversal() {
        let g = count(&from_roots(&[-400.0, 1e3, 1.5]), 3);
        assert_eq!((g.negative, g.positive), (1, 2));
    }
}
