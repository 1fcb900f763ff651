//! Correlation tables, Bell expressions and XOR games, with their classical,
//! quantum and no-signalling values.
//!
//! Tables and expressions are indexed `(x, y, a, b)` row-major: inputs
//! outermost, Bob's output innermost.

use num_traits::{Signed, ToPrimitive};
use serde::ser::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::games::{GameSpec, QuantumStrategy};
use crate::par::{self, Execution};
use crate::rng::{party, SeededRng};
use crate::CONTRACT_TOL;

/// Same shape as the index space of a table or expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Shape {
    pub inputs_a: usize,
    pub inputs_b: usize,
    pub outputs_a: usize,
    pub outputs_b: usize,
}

impl Shape {
    pub fn new(inputs_a: usize, inputs_b: usize, outputs_a: usize, outputs_b: usize) -> Self {
        Shape {
            inputs_a,
            inputs_b,
            outputs_a,
            outputs_b,
        }
    }

    pub fn len(&self) -> usize {
        self.inputs_a * self.inputs_b * self.outputs_a * self.outputs_b
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, x: usize, y: usize, a: usize, b: usize) -> usize {
        ((x * self.inputs_b + y) * self.outputs_a + a) * self.outputs_b + b
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::ShapeMismatch(format!("{} entries for shape {:?}", len, self)));
        }
        Ok(())
    }
}

fn nested<T: Clone>(shape: &Shape, data: &[T]) -> Vec<Vec<Vec<Vec<T>>>> {
    (0..shape.inputs_a)
        .map(|x| {
            (0..shape.inputs_b)
                .map(|y| {
                    (0..shape.outputs_a)
                        .map(|a| (0..shape.outputs_b).map(|b| data[shape.index(x, y, a, b)].clone()).collect())
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// `P(a, b | x, y)` over a generic scalar (floating or exact rational).
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationTable<T = f64> {
    shape: Shape,
    data: Vec<T>,
}

impl<T: Clone + Serialize> Serialize for CorrelationTable<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        nested(&self.shape, &self.data).serialize(s)
    }
}

impl<T> CorrelationTable<T>
where
    T: Clone + Signed + PartialOrd + ToPrimitive,
{
    /// Builds a table and checks positivity and per-input normalization.
    pub fn new(shape: Shape, data: Vec<T>) -> Result<Self> {
        shape.check(data.len())?;
        let t = CorrelationTable { shape, data };
        t.validate()?;
        Ok(t)
    }

    pub fn from_fn(shape: Shape, f: impl Fn(usize, usize, usize, usize) -> T) -> Result<Self> {
        let mut data = Vec::with_capacity(shape.len());
        for x in 0..shape.inputs_a {
            for y in 0..shape.inputs_b {
                for a in 0..shape.outputs_a {
                    for b in 0..shape.outputs_b {
                        data.push(f(x, y, a, b));
                    }
                }
            }
        }
        CorrelationTable::new(shape, data)
    }

    fn validate(&self) -> Result<()> {
        let s = &self.shape;
        for x in 0..s.inputs_a {
            for y in 0..s.inputs_b {
                let mut total = T::zero();
                for a in 0..s.outputs_a {
                    for b in 0..s.outputs_b {
                        let p = self.get(x, y, a, b);
                        if p.to_f64().is_none_or(|v| !(v >= -1e-12)) {
                            return Err(Error::InvalidDistribution(format!("P({a},{b}|{x},{y}) is negative")));
                        }
                        total = total + p.clone();
                    }
                }
                let dev = (total.to_f64().unwrap_or(f64::NAN) - 1.0).abs();
                if !(dev <= CONTRACT_TOL) {
                    return Err(Error::InvalidDistribution(format!("P(.,.|{x},{y}) sums to 1 ± {dev:e}")));
                }
            }
        }
        Ok(())
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize, a: usize, b: usize) -> &T {
        &self.data[self.shape.index(x, y, a, b)]
    }

    /// `P_A(a | x, y) = Σ_b P(a, b | x, y)`.
    pub fn alice_marginal(&self, x: usize, y: usize, a: usize) -> T {
        (0..self.shape.outputs_b).fold(T::zero(), |acc, b| acc + self.get(x, y, a, b).clone())
    }

    pub fn bob_marginal(&self, x: usize, y: usize, b: usize) -> T {
        (0..self.shape.outputs_a).fold(T::zero(), |acc, a| acc + self.get(x, y, a, b).clone())
    }

    /// `λ·self + (1−λ)·other`.
    pub fn mix(&self, other: &Self, lambda: T) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch("tables differ in shape".into()));
        }
        let mu = T::one() - lambda.clone();
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(p, q)| lambda.clone() * p.clone() + mu.clone() * q.clone())
            .collect();
        CorrelationTable::new(self.shape, data)
    }

    pub fn to_f64(&self) -> CorrelationTable<f64> {
        CorrelationTable {
            shape: self.shape,
            data: self.data.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect(),
        }
    }
}

impl CorrelationTable<f64> {
    /// Table without validation; used for deliberately broken fixtures.
    pub fn from_raw(shape: Shape, data: Vec<f64>) -> Result<Self> {
        shape.check(data.len())?;
        Ok(CorrelationTable { shape, data })
    }
}

/// Coefficients `c_abxy` of `C(P) = Σ c_abxy P(a, b | x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BellExpression<T = f64> {
    shape: Shape,
    coeffs: Vec<T>,
}

impl<T: Clone + Serialize> Serialize for BellExpression<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        nested(&self.shape, &self.coeffs).serialize(s)
    }
}

impl<T> BellExpression<T>
where
    T: Clone + Signed + PartialOrd + ToPrimitive,
{
    pub fn new(shape: Shape, coeffs: Vec<T>) -> Result<Self> {
        shape.check(coeffs.len())?;
        if coeffs.iter().any(|c| c.to_f64().is_none_or(|v| !v.is_finite())) {
            return Err(Error::param("coefficients", "must be finite"));
        }
        Ok(BellExpression { shape, coeffs })
    }

    pub fn from_fn(shape: Shape, f: impl Fn(usize, usize, usize, usize) -> T) -> Self {
        let mut coeffs = Vec::with_capacity(shape.len());
        for x in 0..shape.inputs_a {
            for y in 0..shape.inputs_b {
                for a in 0..shape.outputs_a {
                    for b in 0..shape.outputs_b {
                        coeffs.push(f(x, y, a, b));
                    }
                }
            }
        }
        BellExpression { shape, coeffs }
    }

    /// `c_abxy = (−1)^{a⊕b} (−1)^{x∧y}`.
    pub fn chsh() -> Self {
        BellExpression::from_fn(Shape::new(2, 2, 2, 2), |x, y, a, b| {
            if (a ^ b ^ (x & y)) == 0 {
                T::one()
            } else {
                -T::one()
            }
        })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn coeff(&self, x: usize, y: usize, a: usize, b: usize) -> &T {
        &self.coeffs[self.shape.index(x, y, a, b)]
    }

    pub fn evaluate(&self, p: &CorrelationTable<T>) -> Result<T> {
        if self.shape != p.shape {
            return Err(Error::ShapeMismatch(format!("expression {:?} vs table {:?}", self.shape, p.shape)));
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&p.data)
            .fold(T::zero(), |acc, (c, v)| acc + c.clone() * v.clone()))
    }
}

impl BellExpression<f64> {
    /// `max_{a(·), b(·)} Σ_xy c_{a(x) b(y) x y}`. For each of Alice's response
    /// functions Bob's best reply separates over `y`, which keeps the search
    /// to `|A|^|X|` outer iterations.
    pub fn lhv_value(&self) -> Result<f64> {
        Ok(self.lhv_optimum()?.0)
    }

    /// LHV value together with an optimal pair of response functions.
    pub fn lhv_optimum(&self) -> Result<(f64, Vec<usize>, Vec<usize>)> {
        let s = self.shape;
        let size = (s.outputs_a as f64).powi(s.inputs_a as i32) * (s.outputs_b as f64).powi(s.inputs_b as i32);
        if size > crate::games::MAX_STRATEGY_SPACE {
            return Err(Error::SearchSpaceTooLarge {
                size,
                limit: crate::games::MAX_STRATEGY_SPACE,
            });
        }
        let alice_count = s.outputs_a.pow(s.inputs_a as u32);
        let mut best = (f64::NEG_INFINITY, vec![], vec![]);
        let mut resp_a = vec![0usize; s.inputs_a];
        for idx in 0..alice_count {
            let mut r = idx;
            for slot in resp_a.iter_mut().rev() {
                *slot = r % s.outputs_a;
                r /= s.outputs_a;
            }
            let mut total = 0.0;
            let mut resp_b = vec![0usize; s.inputs_b];
            for (y, rb) in resp_b.iter_mut().enumerate() {
                let mut best_b = (f64::NEG_INFINITY, 0);
                for b in 0..s.outputs_b {
                    let v: f64 = (0..s.inputs_a).map(|x| self.coeff(x, y, resp_a[x], b)).sum();
                    if v > best_b.0 {
                        best_b = (v, b);
                    }
                }
                total += best_b.0;
                *rb = best_b.1;
            }
            if total > best.0 + 1e-12 {
                best = (total, resp_a.clone(), resp_b);
            }
        }
        Ok(best)
    }
}

/// XOR game with signed weights `m_xy`; the Bell expression is
/// `c_abxy = m_xy (−1)^{a⊕b}`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct XorGame {
    inputs_a: usize,
    inputs_b: usize,
    weights: Vec<f64>,
}

impl XorGame {
    pub fn new(inputs_a: usize, inputs_b: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != inputs_a * inputs_b {
            return Err(Error::ShapeMismatch(format!(
                "{} weights for a {inputs_a}x{inputs_b} game",
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::param("weights", "must be finite"));
        }
        Ok(XorGame {
            inputs_a,
            inputs_b,
            weights,
        })
    }

    /// `m_xy = (−1)^{x∧y}`.
    pub fn chsh() -> Self {
        XorGame::new(2, 2, vec![1.0, 1.0, 1.0, -1.0]).expect("2x2")
    }

    /// Independent uniform weights in `[-1, 1]`.
    pub fn random(inputs_a: usize, inputs_b: usize, rng: &mut SeededRng) -> Self {
        let weights = (0..inputs_a * inputs_b).map(|_| 2.0 * rng.uniform() - 1.0).collect();
        XorGame::new(inputs_a, inputs_b, weights).expect("sized")
    }

    pub fn inputs_a(&self) -> usize {
        self.inputs_a
    }

    pub fn inputs_b(&self) -> usize {
        self.inputs_b
    }

    pub fn weight(&self, x: usize, y: usize) -> f64 {
        self.weights[x * self.inputs_b + y]
    }

    pub fn expression(&self) -> BellExpression<f64> {
        BellExpression::from_fn(Shape::new(self.inputs_a, self.inputs_b, 2, 2), |x, y, a, b| {
            let w = self.weight(x, y);
            if a == b {
                w
            } else {
                -w
            }
        })
    }

    pub fn lhv_value(&self) -> Result<f64> {
        self.expression().lhv_value()
    }

    /// `Σ_xy |m_xy|`.
    pub fn ns_value(&self) -> f64 {
        self.weights.iter().map(|w| w.abs()).sum()
    }

    fn value_of(&self, alpha: &[Vec<f64>], beta: &[Vec<f64>]) -> f64 {
        let mut v = 0.0;
        for (x, a) in alpha.iter().enumerate() {
            for (y, b) in beta.iter().enumerate() {
                v += self.weight(x, y) * dot(a, b);
            }
        }
        v
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Replaces `target` by the normalization of `v` unless `v` vanishes.
fn set_normalized(target: &mut [f64], v: &[f64]) {
    let n = dot(v, v).sqrt();
    if n > 1e-300 {
        for (t, x) in target.iter_mut().zip(v) {
            *t = x / n;
        }
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct SeesawConfig {
    pub dim: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl SeesawConfig {
    /// Dimension `min(|X| + |Y|, 8)`, 1000 iterations, 8 restarts.
    pub fn for_game(g: &XorGame, seed: u64) -> Self {
        SeesawConfig {
            dim: (g.inputs_a + g.inputs_b).clamp(2, 8),
            max_iters: 1000,
            tol: 1e-13,
            restarts: 8,
            seed,
        }
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct SeesawRun {
    /// Value after each full Alice-then-Bob update.
    pub history: Vec<f64>,
    pub alpha: Vec<Vec<f64>>,
    pub beta: Vec<Vec<f64>>,
}

impl SeesawRun {
    pub fn value(&self) -> f64 {
        self.history.last().copied().unwrap_or(f64::NEG_INFINITY)
    }

    pub fn iterations(&self) -> usize {
        self.history.len()
    }
}

/// Lower bound on the quantum value of an XOR game from alternating
/// optimization over real unit vectors.
#[derive(Clone, Debug, serde::Serialize)]
pub struct QmValue {
    pub value: f64,
    pub best_restart: usize,
    pub runs: Vec<SeesawRun>,
}

impl QmValue {
    pub fn best(&self) -> &SeesawRun {
        &self.runs[self.best_restart]
    }
}

fn seesaw(g: &XorGame, mut alpha: Vec<Vec<f64>>, mut beta: Vec<Vec<f64>>, cfg: &SeesawConfig) -> SeesawRun {
    let d = cfg.dim;
    let mut history = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    let mut acc = vec![0.0; d];
    for _ in 0..cfg.max_iters {
        for (x, a) in alpha.iter_mut().enumerate() {
            acc.iter_mut().for_each(|v| *v = 0.0);
            for (y, b) in beta.iter().enumerate() {
                let w = g.weight(x, y);
                acc.iter_mut().zip(b).for_each(|(s, bi)| *s += w * bi);
            }
            set_normalized(a, &acc);
        }
        for (y, b) in beta.iter_mut().enumerate() {
            acc.iter_mut().for_each(|v| *v = 0.0);
            for (x, a) in alpha.iter().enumerate() {
                let w = g.weight(x, y);
                acc.iter_mut().zip(a).for_each(|(s, ai)| *s += w * ai);
            }
            set_normalized(b, &acc);
        }
        let v = g.value_of(&alpha, &beta);
        history.push(v);
        if v - prev < cfg.tol {
            break;
        }
        prev = v;
    }
    SeesawRun { history, alpha, beta }
}

fn random_unit_vectors(count: usize, dim: usize, rng: &mut SeededRng) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| {
            let mut v = vec![0.0; dim];
            let raw: Vec<f64> = (0..dim).map(|_| rng.normal()).collect();
            v[0] = 1.0;
            set_normalized(&mut v, &raw);
            v
        })
        .collect()
}

/// Seesaw lower bound on `C_qm`: `cfg.restarts` seeded random starts, plus
/// one start from an optimal deterministic strategy embedded along the
/// first axis (when the classical search space is small enough), so the
/// result never falls below the LHV value. The best run is kept.
pub fn qm_value_xor(g: &XorGame, cfg: &SeesawConfig, exec: Execution) -> Result<QmValue> {
    if cfg.dim < 2 {
        return Err(Error::param("dim", "vector dimension must be at least 2"));
    }
    let warm = g.expression().lhv_optimum().ok();
    let starts = cfg.restarts + usize::from(warm.is_some());
    let runs = par::map_indexed(exec, starts, |r| {
        let (alpha, beta) = if r < cfg.restarts {
            let mut rng = SeededRng::derive(cfg.seed, party::SHARED, r as u64);
            let alpha = random_unit_vectors(g.inputs_a, cfg.dim, &mut rng);
            let beta = random_unit_vectors(g.inputs_b, cfg.dim, &mut rng);
            (alpha, beta)
        } else {
            let (_, ra, rb) = warm.as_ref().expect("warm start present");
            let axis = |bit: usize| {
                let mut v = vec![0.0; cfg.dim];
                v[0] = if bit == 0 { 1.0 } else { -1.0 };
                v
            };
            (ra.iter().map(|&a| axis(a)).collect(), rb.iter().map(|&b| axis(b)).collect())
        };
        seesaw(g, alpha, beta, cfg)
    });
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value() > runs[best].value() + 1e-15 {
            best = i;
        }
    }
    Ok(QmValue {
        value: runs[best].value(),
        best_restart: best,
        runs,
    })
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct NoSignallingReport {
    /// `max |Σ_b P(a,b|x,y) − Σ_b P(a,b|x,y')|`.
    pub alice_deviation: f64,
    /// `max |Σ_a P(a,b|x,y) − Σ_a P(a,b|x',y)|`.
    pub bob_deviation: f64,
    /// Both deviations are exactly zero in the table's own arithmetic.
    pub exact_zero: bool,
    pub pass: bool,
}

pub fn no_signalling_check<T>(p: &CorrelationTable<T>) -> NoSignallingReport
where
    T: Clone + Signed + PartialOrd + ToPrimitive,
{
    let s = p.shape;
    let mut worst_a = T::zero();
    let mut worst_b = T::zero();
    for x in 0..s.inputs_a {
        for a in 0..s.outputs_a {
            for y in 0..s.inputs_b {
                for y2 in y + 1..s.inputs_b {
                    let d = (p.alice_marginal(x, y, a) - p.alice_marginal(x, y2, a)).abs();
                    if d > worst_a {
                        worst_a = d;
                    }
                }
            }
        }
    }
    for y in 0..s.inputs_b {
        for b in 0..s.outputs_b {
            for x in 0..s.inputs_a {
                for x2 in x + 1..s.inputs_a {
                    let d = (p.bob_marginal(x, y, b) - p.bob_marginal(x2, y, b)).abs();
                    if d > worst_b {
                        worst_b = d;
                    }
                }
            }
        }
    }
    let alice_deviation = worst_a.to_f64().unwrap_or(f64::NAN);
    let bob_deviation = worst_b.to_f64().unwrap_or(f64::NAN);
    NoSignallingReport {
        alice_deviation,
        bob_deviation,
        exact_zero: worst_a.is_zero() && worst_b.is_zero(),
        pass: alice_deviation < CONTRACT_TOL && bob_deviation < CONTRACT_TOL,
    }
}

/// Exact Born-rule table `⟨ψ| Π_a(x) ⊗ Π_b(y) |ψ⟩` of a two-party strategy,
/// shaped by the game's alphabets.
pub fn correlation_from_quantum(strategy: &QuantumStrategy, game: &GameSpec) -> Result<CorrelationTable<f64>> {
    if strategy.parties() != 2 || game.parties() != 2 {
        return Err(Error::param("parties", "correlation tables need exactly two parties"));
    }
    let (ix, iy) = (game.input_sizes()[0], game.input_sizes()[1]);
    let (oa, ob) = (game.output_sizes()[0], game.output_sizes()[1]);
    let shape = Shape::new(ix, iy, oa, ob);
    let mut data = vec![0.0; shape.len()];
    for x in 0..ix {
        for y in 0..iy {
            for (o, prob) in strategy.joint_distribution(&[x, y])? {
                if o[0] >= oa || o[1] >= ob {
                    return Err(Error::AlphabetMismatch(format!("outcome {o:?} outside the game alphabet")));
                }
                data[shape.index(x, y, o[0], o[1])] += prob;
            }
        }
    }
    CorrelationTable::new(shape, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{chsh_game, chsh_quantum};
    use std::f64::consts::SQRT_2;

    #[test]
    fn chsh_values() {
        let g = XorGame::chsh();
        assert_eq!(g.lhv_value().unwrap(), 2.0);
        assert_eq!(g.ns_value(), 4.0);
        let q = qm_value_xor(&g, &SeesawConfig::for_game(&g, 7), Execution::Sequential).unwrap();
        assert!((q.value - 2.0 * SQRT_2).abs() < 1e-6);
    }

    #[test]
    fn quantum_table_hits_tsirelson() {
        let t = correlation_from_quantum(&chsh_quantum(), &chsh_game()).unwrap();
        let v = BellExpression::chsh().evaluate(&t).unwrap();
        assert!((v - 2.0 * SQRT_2).abs() < 1e-9);
        assert!(no_signalling_check(&t).pass);
    }

    #[test]
    fn signalling_violation_is_measured() {
        // Alice's marginal moves by 0.1 when y changes.
        let shape = Shape::new(1, 2, 2, 2);
        let t = CorrelationTable::new(shape, vec![0.25, 0.25, 0.25, 0.25, 0.35, 0.25, 0.15, 0.25]).unwrap();
        let r = no_signalling_check(&t);
        assert!(!r.pass);
        assert!((r.alice_deviation - 0.1).abs() < 1e-12);
    }

    #[test]
    fn trivial_cases() {
        let shape = Shape::new(1, 1, 1, 1);
        let e = BellExpression::new(shape, vec![3.5]).unwrap();
        assert_eq!(e.lhv_value().unwrap(), 3.5);
        let zero = BellExpression::from_fn(Shape::new(2, 2, 2, 2), |_, _, _, _| 0.0);
        let t = correlation_from_quantum(&chsh_quantum(), &chsh_game()).unwrap();
        assert_eq!(zero.evaluate(&t).unwrap(), 0.0);
        assert_eq!(XorGame::new(3, 3, vec![1.0; 9]).unwrap().ns_value(), 9.0);
        assert_eq!(XorGame::new(2, 2, vec![0.0; 4]).unwrap().ns_value(), 0.0);
    }

    #[test]
    fn single_weight_game() {
        let g = XorGame::new(2, 2, vec![0.0, -1.5, 0.0, 0.0]).unwrap();
        let q = qm_value_xor(&g, &SeesawConfig::for_game(&g, 1), Execution::Sequential).unwrap();
        assert!((q.value - 1.5).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_shapes() {
        let t = correlation_from_quantum(&chsh_quantum(), &chsh_game()).unwrap();
        let e = BellExpression::from_fn(Shape::new(3, 2, 2, 2), |_, _, _, _| 1.0);
        assert!(matches!(e.evaluate(&t), Err(Error::ShapeMismatch(_))));
        assert!(CorrelationTable::new(Shape::new(1, 1, 2, 1), vec![0.7, 0.7]).is_err());
        assert!(CorrelationTable::new(Shape::new(1, 1, 2, 1), vec![1.1, -0.1]).is_err());
    }
}
