//! Per-cube labeling from the 28 pairwise flags of its corners.

/// The 28 unordered corner pairs `(i, j)`, `i < j`, in lexicographic order.
pub const PAIRS: [(usize, usize); 28] = pairs();

const fn pairs() -> [(usize, usize); 28] {
    let mut out = [(0, 0); 28];
    let mut n = 0;
    let mut i = 0;
    while i < 8 {
        let mut j = i + 1;
        while j < 8 {
            out[n] = (i, j);
            n += 1;
            j += 1;
        }
        i += 1;
    }
    out
}

/// For each labeling with corner 0 unset (index `c / 2`), the bit set of
/// pairs it separates.
const CUT_MASKS: [u32; 128] = cut_masks();

const fn cut_masks() -> [u32; 128] {
    let mut out = [0u32; 128];
    let mut h = 0;
    while h < 128 {
        let c = h * 2;
        let mut m = 0u32;
        let mut p = 0;
        while p < 28 {
            let (i, j) = PAIRS[p];
            if (c >> i) & 1 != (c >> j) & 1 {
                m |= 1 << p;
            }
            p += 1;
        }
        out[h] = m;
        h += 1;
    }
    out
}

/// Flags `b_ij` in `[0, 1]` for the pairs in [`PAIRS`] order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssignmentProblem {
    pub flags: [f64; 28],
}

impl AssignmentProblem {
    pub fn new(flags: [f64; 28]) -> Self {
        Self { flags }
    }

    /// Flags of a labeling: 1 exactly where the labels differ.
    pub fn from_labels(labels: u8) -> Self {
        let mut flags = [0.0; 28];
        for (f, &(i, j)) in flags.iter_mut().zip(&PAIRS) {
            *f = (((labels >> i) ^ (labels >> j)) & 1) as f64;
        }
        Self { flags }
    }

    pub fn flag(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        let p = PAIRS.iter().position(|&q| q == (i, j)).expect("corner pair");
        self.flags[p]
    }

    /// Disagreement cost of a labeling: each separated pair costs `1 - b`,
    /// each pair kept together costs `b`.
    pub fn cost(&self, labels: u8) -> f64 {
        let mut cost = 0.0;
        for (&b, &(i, j)) in self.flags.iter().zip(&PAIRS) {
            if ((labels >> i) ^ (labels >> j)) & 1 == 1 {
                cost += 1.0 - b;
            } else {
                cost += b;
            }
        }
        cost
    }
}

/// Minimum-cost labeling with corner 0 labeled 0, ties going to the smallest
/// labeling as an integer. A labeling and its complement cost the same, so
/// this covers all 256.
pub fn solve_assignment(prob: &AssignmentProblem) -> (u8, f64) {
    if prob.flags.iter().all(|&b| b == 0.0) {
        return (0, 0.0);
    }
    let w: [f64; 28] = prob.flags.map(|b| 1.0 - 2.0 * b);
    let mut best = (0usize, f64::INFINITY);
    for (h, &mask) in CUT_MASKS.iter().enumerate() {
        let mut m = mask;
        let mut delta = 0.0;
        while m != 0 {
            let p = m.trailing_zeros() as usize;
            delta += w[p];
            m &= m - 1;
        }
        if delta < best.1 {
            best = (h, delta);
        }
    }
    let labels = (best.0 * 2) as u8;
    (labels, prob.cost(labels))
}
