use serde::Serialize;

use super::CommMatrix;
use crate::error::{Error, Result};
use crate::par::{map_indexed, Execution};
use crate::rng::SeededRng;

pub const MAX_EXACT_N: usize = 3;

/// `A × B` with `A, B ⊆ {0,1}ⁿ` listed as sorted integer codes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rectangle {
    pub n: usize,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl Rectangle {
    pub fn new(n: usize, mut a: Vec<usize>, mut b: Vec<usize>) -> Result<Self> {
        let size = 1usize << n;
        a.sort_unstable();
        a.dedup();
        b.sort_unstable();
        b.dedup();
        if a.iter().chain(&b).any(|&v| v >= size) {
            return Err(Error::param("rectangle", format!("members must be below 2^{n}")));
        }
        Ok(Rectangle { n, a, b })
    }

    pub fn full(n: usize) -> Self {
        Rectangle {
            n,
            a: (0..1 << n).collect(),
            b: (0..1 << n).collect(),
        }
    }

    /// Each element of either side is kept independently with probability 1/2.
    pub fn random(n: usize, rng: &mut SeededRng) -> Self {
        let side = |rng: &mut SeededRng| (0..1usize << n).filter(|_| rng.bit()).collect();
        let a = side(rng);
        let b = side(rng);
        Rectangle { n, a, b }
    }

    fn from_masks(n: usize, a: u64, b: u64) -> Self {
        let members = |m: u64| (0..1usize << n).filter(|&v| m >> v & 1 == 1).collect();
        Rectangle {
            n,
            a: members(a),
            b: members(b),
        }
    }
}

/// Distribution `μ` over `{0,1}ⁿ × {0,1}ⁿ`, row-major in `(x, y)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputDistribution {
    n: usize,
    weights: Vec<f64>,
}

impl InputDistribution {
    pub fn new(n: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != 1 << (2 * n) {
            return Err(Error::LengthMismatch(1 << (2 * n), weights.len()));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution("μ must be a probability distribution".into()));
        }
        Ok(InputDistribution { n, weights })
    }

    pub fn uniform(n: usize) -> Self {
        let size = 1usize << (2 * n);
        InputDistribution {
            n,
            weights: vec![1.0 / size as f64; size],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, x: usize, y: usize) -> f64 {
        self.weights[(x << self.n) | y]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum DiscrepancyMode {
    /// Every `A`, with the optimal `B` for it chosen in closed form.
    Exact,
    /// Every pair `(A, B)` enumerated explicitly.
    Enumerate,
    /// Random rectangles, optionally improved by alternating best responses.
    Sampled { samples: usize, greedy: bool },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Discrepancy {
    pub value: f64,
    pub witness: Rectangle,
    /// `false` when the value is only a lower bound.
    pub exact: bool,
    pub rectangles: u64,
}

/// `δ_μ(R) = |μ(R ∩ f⁻¹(1)) − μ(R ∩ f⁻¹(0))|`.
pub fn rectangle_discrepancy(m: &CommMatrix, mu: &InputDistribution, r: &Rectangle) -> f64 {
    let mut s = 0.0;
    for &x in &r.a {
        for &y in &r.b {
            s += signed(m, mu, x, y);
        }
    }
    s.abs()
}

fn signed(m: &CommMatrix, mu: &InputDistribution, x: usize, y: usize) -> f64 {
    let w = mu.weight(x, y);
    if m.get(x, y) {
        w
    } else {
        -w
    }
}

/// For fixed `A`, the best `B` keeps the columns of one sign.
fn best_b(m: &CommMatrix, mu: &InputDistribution, a_mask: u64) -> (f64, u64) {
    let size = m.size();
    let mut col = vec![0.0; size];
    for x in (0..size).filter(|&x| a_mask >> x & 1 == 1) {
        for (y, c) in col.iter_mut().enumerate() {
            *c += signed(m, mu, x, y);
        }
    }
    let (mut pos, mut neg, mut pm, mut nm) = (0.0, 0.0, 0u64, 0u64);
    for (y, &c) in col.iter().enumerate() {
        if c > 0.0 {
            pos += c;
            pm |= 1 << y;
        } else if c < 0.0 {
            neg -= c;
            nm |= 1 << y;
        }
    }
    if pos >= neg {
        (pos, pm)
    } else {
        (neg, nm)
    }
}

fn best_a(m: &CommMatrix, mu: &InputDistribution, b_mask: u64) -> (f64, u64) {
    let size = m.size();
    let (mut pos, mut neg, mut pm, mut nm) = (0.0, 0.0, 0u64, 0u64);
    for x in 0..size {
        let r: f64 = (0..size).filter(|&y| b_mask >> y & 1 == 1).map(|y| signed(m, mu, x, y)).sum();
        if r > 0.0 {
            pos += r;
            pm |= 1 << x;
        } else if r < 0.0 {
            neg -= r;
            nm |= 1 << x;
        }
    }
    if pos >= neg {
        (pos, pm)
    } else {
        (neg, nm)
    }
}

fn mask_discrepancy(m: &CommMatrix, mu: &InputDistribution, a: u64, b: u64) -> f64 {
    let size = m.size();
    let mut s = 0.0;
    for x in (0..size).filter(|&x| a >> x & 1 == 1) {
        for y in (0..size).filter(|&y| b >> y & 1 == 1) {
            s += signed(m, mu, x, y);
        }
    }
    s.abs()
}

/// `δ_μ(f) = max_R δ_μ(R)`. Ties keep the first rectangle in subset order,
/// so results are identical under either execution mode.
pub fn discrepancy(
    m: &CommMatrix,
    mu: &InputDistribution,
    mode: DiscrepancyMode,
    rng: &mut SeededRng,
    exec: Execution,
) -> Result<Discrepancy> {
    if mu.n() != m.n() {
        return Err(Error::ShapeMismatch("distribution and matrix sizes differ".into()));
    }
    let n = m.n();
    let pick = |acc: Option<(f64, u64, u64)>, cand: (f64, u64, u64)| match acc {
        Some(best) if best.0 >= cand.0 => Some(best),
        _ => Some(cand),
    };
    let (value, a, b, count, exact) = match mode {
        DiscrepancyMode::Exact | DiscrepancyMode::Enumerate => {
            if n > MAX_EXACT_N {
                return Err(Error::param("n", format!("exhaustive discrepancy needs n ≤ {MAX_EXACT_N}")));
            }
            let subsets = 1u64 << (1u64 << n);
            let enumerate = mode == DiscrepancyMode::Enumerate;
            let per_a = map_indexed(exec, subsets as usize, |a| {
                let a = a as u64;
                if enumerate {
                    (0..subsets).map(|b| (mask_discrepancy(m, mu, a, b), a, b)).fold(None, pick).expect("non-empty")
                } else {
                    let (v, b) = best_b(m, mu, a);
                    (v, a, b)
                }
            });
            let best = per_a.into_iter().fold(None, pick).expect("non-empty");
            let count = if enumerate { subsets * subsets } else { subsets };
            (best.0, best.1, best.2, count, true)
        }
        DiscrepancyMode::Sampled { samples, greedy } => {
            if n > 6 {
                return Err(Error::param("n", "sampled discrepancy uses 64-bit subsets, so n ≤ 6"));
            }
            if samples == 0 {
                return Err(Error::param("samples", "must be positive"));
            }
            let size = 1usize << n;
            let mut best: Option<(f64, u64, u64)> = None;
            for _ in 0..samples {
                let draw = |rng: &mut SeededRng| (0..size).fold(0u64, |acc, v| if rng.bit() { acc | 1 << v } else { acc });
                let (mut a, mut b) = (draw(rng), draw(rng));
                let mut v = mask_discrepancy(m, mu, a, b);
                if greedy {
                    loop {
                        let (vb, nb) = best_b(m, mu, a);
                        let (va, na) = best_a(m, mu, nb);
                        let nv = vb.max(va);
                        if nv <= v + 1e-15 {
                            break;
                        }
                        (a, b, v) = if va >= vb { (na, nb, va) } else { (a, nb, vb) };
                    }
                }
                best = pick(best, (v, a, b));
            }
            let best = best.expect("samples > 0");
            (best.0, best.1, best.2, samples as u64, false)
        }
    };
    Ok(Discrepancy {
        value,
        witness: Rectangle::from_masks(n, a, b),
        exact,
        rectangles: count,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LindseyCheck {
    /// `|Σ_{a∈A, b∈B} (−1)^{a·b}|`.
    pub lhs: u64,
    /// `√(|A| |B| 2ⁿ)`.
    pub rhs: f64,
    pub pass: bool,
}

pub fn lindsey_check(r: &Rectangle) -> Result<LindseyCheck> {
    if r.n > super::MAX_MATRIX_N {
        return Err(Error::param("n", format!("Lindsey checks are limited to n ≤ {}", super::MAX_MATRIX_N)));
    }
    let mut sum: i64 = 0;
    for &a in &r.a {
        for &b in &r.b {
            sum += if (a & b).count_ones() % 2 == 0 { 1 } else { -1 };
        }
    }
    let lhs = sum.unsigned_abs();
    let rhs = ((r.a.len() * r.b.len()) as f64 * (1u64 << r.n) as f64).sqrt();
    Ok(LindseyCheck {
        lhs,
        rhs,
        pass: lhs as f64 <= rhs + 1e-9,
    })
}
