//! Nearest-neighbor balls `B_k(x)`: the smallest Euclidean ball centred at
//! `x` holding at least `k` points. Every point at the critical radius is
//! included, so a ball may hold more than `k` points.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::math::sq_dist;

#[derive(Debug, Clone)]
pub(crate) struct NeighborIndex {
    x: Vec<f64>,
    d: usize,
    axis: Option<SortedAxis>,
}

/// One-dimensional accelerator: points sorted by coordinate.
#[derive(Debug, Clone)]
struct SortedAxis {
    values: Vec<f64>,
    order: Vec<usize>,
}

impl NeighborIndex {
    pub(crate) fn new(x: Vec<f64>, d: usize) -> Self {
        let axis = (d == 1).then(|| {
            let mut order: Vec<usize> = (0..x.len()).collect();
            order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
            SortedAxis {
                values: order.iter().map(|&i| x[i]).collect(),
                order,
            }
        });
        Self { x, d, axis }
    }

    /// Reference implementation without the sorted-axis accelerator.
    #[cfg(test)]
    pub(crate) fn brute_force(x: Vec<f64>, d: usize) -> Self {
        Self { x, d, axis: None }
    }

    pub(crate) fn len(&self) -> usize {
        self.x.len() / self.d
    }

    pub(crate) fn point(&self, i: usize) -> &[f64] {
        &self.x[i * self.d..(i + 1) * self.d]
    }

    /// Indices of the points in `B_k(query)`, unordered.
    pub(crate) fn ball(&self, query: &[f64], k: usize) -> Vec<usize> {
        debug_assert!(k >= 1 && k <= self.len());
        match &self.axis {
            Some(axis) => {
                let (lo, hi) = axis.window(query[0], k);
                axis.order[lo..hi].to_vec()
            }
            None => {
                let dists: Vec<f64> = (0..self.len())
                    .map(|i| sq_dist(query, self.point(i)))
                    .collect();
                let mut scratch = dists.clone();
                let (_, radius, _) = scratch.select_nth_unstable_by(k - 1, f64::total_cmp);
                let radius = *radius;
                dists
                    .iter()
                    .enumerate()
                    .filter(|(_, &dist)| dist <= radius)
                    .map(|(i, _)| i)
                    .collect()
            }
        }
    }

    /// The `k_max` nearest points and every point tied with the last of them,
    /// as `(squared distance, index)` sorted by distance.
    pub(crate) fn ordered(&self, query: &[f64], k_max: usize) -> Vec<(f64, usize)> {
        match &self.axis {
            Some(axis) => {
                let q = query[0];
                let (lo, hi) = axis.window(q, k_max);
                // Merge the two monotone sides of the window.
                let p = axis.values.partition_point(|&v| v < q).clamp(lo, hi);
                let (mut left, mut right) = (p, p);
                let mut out = Vec::with_capacity(hi - lo);
                while left > lo || right < hi {
                    let dl = (left > lo).then(|| sq(q - axis.values[left - 1]));
                    let dr = (right < hi).then(|| sq(q - axis.values[right]));
                    match (dl, dr) {
                        (Some(l), Some(r)) if l <= r => {
                            left -= 1;
                            out.push((l, axis.order[left]));
                        }
                        (_, Some(r)) => {
                            out.push((r, axis.order[right]));
                            right += 1;
                        }
                        (Some(l), None) => {
                            left -= 1;
                            out.push((l, axis.order[left]));
                        }
                        (None, None) => unreachable!(),
                    }
                }
                out
            }
            None => {
                let mut all: Vec<(f64, usize)> = (0..self.len())
                    .map(|i| (sq_dist(query, self.point(i)), i))
                    .collect();
                all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                let radius = all[k_max - 1].0;
                let end = all.partition_point(|&(dist, _)| dist <= radius);
                all.truncate(end);
                all
            }
        }
    }
}

#[inline]
fn sq(v: f64) -> f64 {
    v * v
}

impl SortedAxis {
    /// Window `[lo, hi)` of sorted positions covering `B_k(q)`, ties included.
    fn window(&self, q: f64, k: usize) -> (usize, usize) {
        let n = self.values.len();
        let p = self.values.partition_point(|&v| v < q);
        let (mut lo, mut hi) = (p, p);
        let mut radius = f64::NEG_INFINITY;
        while hi - lo < k {
            let take_left = match (lo > 0, hi < n) {
                (true, true) => {
                    sq(q - self.values[lo - 1]).total_cmp(&sq(q - self.values[hi]))
                        != Ordering::Greater
                }
                (true, false) => true,
                (false, true) => false,
                (false, false) => unreachable!(),
            };
            let dist = if take_left {
                lo -= 1;
                sq(q - self.values[lo])
            } else {
                hi += 1;
                sq(q - self.values[hi - 1])
            };
            radius = radius.max(dist);
        }
        while lo > 0 && sq(q - self.values[lo - 1]) <= radius {
            lo -= 1;
        }
        while hi < n && sq(q - self.values[hi]) <= radius {
            hi += 1;
        }
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn sorted(mut v: Vec<usize>) -> Vec<usize> {
        v.sort_unstable();
        v
    }

    #[test]
    fn ties_at_the_radius_are_included() {
        let index = NeighborIndex::new(vec![0.0, 1.0, -1.0, 3.0], 1);
        assert_eq!(sorted(index.ball(&[0.0], 2)), vec![0, 1, 2]);
        assert_eq!(sorted(index.ball(&[0.0], 1)), vec![0]);
        let brute = NeighborIndex::brute_force(vec![0.0, 1.0, -1.0, 3.0], 1);
        assert_eq!(sorted(brute.ball(&[0.0], 2)), vec![0, 1, 2]);
    }

    #[test]
    fn duplicated_points_share_a_ball() {
        let index = NeighborIndex::new(vec![2.0, 2.0, 2.0, 5.0], 1);
        assert_eq!(sorted(index.ball(&[2.0], 1)), vec![0, 1, 2]);
        assert_eq!(sorted(index.ball(&[5.0], 2)), vec![0, 1, 2, 3]);
    }

    proptest! {
        #[test]
        fn sorted_axis_matches_brute_force(
            xs in proptest::collection::vec(-3i32..3, 1..40),
            q in -4i32..4,
            k_frac in 0.0f64..1.0,
        ) {
            // Integer-valued coordinates produce plenty of distance ties.
            let x: Vec<f64> = xs.iter().map(|&v| v as f64 * 0.5).collect();
            let k = 1 + ((x.len() - 1) as f64 * k_frac) as usize;
            let q = [q as f64 * 0.5];
            let fast = NeighborIndex::new(x.clone(), 1);
            let slow = NeighborIndex::brute_force(x, 1);
            prop_assert_eq!(sorted(fast.ball(&q, k)), sorted(slow.ball(&q, k)));

            let fo = fast.ordered(&q, k);
            let so = slow.ordered(&q, k);
            prop_assert_eq!(fo.len(), so.len());
            prop_assert_eq!(sorted(fo.iter().map(|p| p.1).collect()), sorted(so.iter().map(|p| p.1).collect()));
            prop_assert!(fo.windows(2).all(|w| w[0].0 <= w[1].0));
            prop_assert_eq!(sorted(fast.ball(&q, k)), sorted(fo.iter().map(|p| p.1).collect()));
        }

        #[test]
        fn brute_force_ball_holds_at_least_k(
            pts in proptest::collection::vec((-2i32..2, -2i32..2), 1..30),
            k_frac in 0.0f64..1.0,
        ) {
            let x: Vec<f64> = pts.iter().flat_map(|&(a, b)| [a as f64, b as f64]).collect();
            let index = NeighborIndex::new(x, 2);
            let k = 1 + ((index.len() - 1) as f64 * k_frac) as usize;
            let ball = index.ball(&[0.0, 0.0], k);
            prop_assert!(ball.len() >= k);
            let radius = ball.iter().map(|&i| sq_dist(&[0.0, 0.0], index.point(i))).fold(0.0, f64::max);
            let inside = (0..index.len()).filter(|&i| sq_dist(&[0.0, 0.0], index.point(i)) <= radius).count();
            prop_assert_eq!(inside, ball.len());
        }
    }
}
