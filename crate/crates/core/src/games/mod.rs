//! Non-locality games, exact evaluation and exhaustive classical optima.

mod canonical;

pub use canonical::{
    chsh_game, chsh_quantum, ghz_game, ghz_quantum, magic_square_classical_example, magic_square_game,
    magic_square_quantum, pauli_table, tsirelson_check, tsirelson_operator, CHSH_ANGLES,
};

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::qstate::{ProjectiveMeasurement, StateVector};
use crate::CONTRACT_TOL;

/// Largest deterministic strategy space `best_classical` will enumerate.
pub const MAX_STRATEGY_SPACE: f64 = 1e8;

/// Margin by which a strategy must beat the incumbent to replace it, so that
/// rounding noise cannot break the smallest-encoding tie rule.
const TIE_MARGIN: f64 = 1e-12;

pub type PromiseFn = Arc<dyn Fn(&[usize]) -> bool + Send + Sync>;
pub type WinFn = Arc<dyn Fn(&[usize], &[usize]) -> bool + Send + Sync>;

/// A game between 2 or 3 parties: alphabets, promise, winning predicate and
/// the distribution the referee draws joint inputs from.
#[derive(Clone)]
pub struct GameSpec {
    name: String,
    input_sizes: Vec<usize>,
    output_sizes: Vec<usize>,
    promise: PromiseFn,
    win: WinFn,
    distribution: Vec<(Vec<usize>, f64)>,
}

impl fmt::Debug for GameSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GameSpec")
            .field("name", &self.name)
            .field("input_sizes", &self.input_sizes)
            .field("output_sizes", &self.output_sizes)
            .field("distribution", &self.distribution)
            .finish()
    }
}

/// All tuples of a mixed-radix alphabet in lexicographic order.
pub(crate) fn tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = sizes.iter().product();
    (0..total)
        .map(|mut idx| {
            let mut t = vec![0; sizes.len()];
            for (slot, &r) in t.iter_mut().zip(sizes).rev() {
                *slot = idx % r;
                idx /= r;
            }
            t
        })
        .collect()
}

impl GameSpec {
    pub fn new(
        name: impl Into<String>,
        input_sizes: Vec<usize>,
        output_sizes: Vec<usize>,
        promise: PromiseFn,
        win: WinFn,
        distribution: Vec<(Vec<usize>, f64)>,
    ) -> Result<Self> {
        let parties = input_sizes.len();
        if !(2..=3).contains(&parties) || output_sizes.len() != parties {
            return Err(Error::param("parties", "a game has 2 or 3 parties with one alphabet each"));
        }
        if input_sizes.iter().chain(&output_sizes).any(|&s| s == 0) {
            return Err(Error::param("alphabets", "alphabets must be non-empty"));
        }
        let mut total = 0.0;
        for (inputs, p) in &distribution {
            if inputs.len() != parties || inputs.iter().zip(&input_sizes).any(|(&x, &s)| x >= s) {
                return Err(Error::InvalidDistribution(format!("input {inputs:?} outside the alphabet")));
            }
            if !promise(inputs) {
                return Err(Error::InvalidDistribution(format!("input {inputs:?} violates the promise")));
            }
            if !(*p >= 0.0) {
                return Err(Error::InvalidDistribution(format!("negative weight {p} on {inputs:?}")));
            }
            total += p;
        }
        if (total - 1.0).abs() > crate::IDENTITY_TOL {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
        }
        Ok(GameSpec {
            name: name.into(),
            input_sizes,
            output_sizes,
            promise,
            win,
            distribution,
        })
    }

    /// Uniform distribution over every promise-satisfying joint input.
    pub fn uniform_on_promise(
        name: impl Into<String>,
        input_sizes: Vec<usize>,
        output_sizes: Vec<usize>,
        promise: PromiseFn,
        win: WinFn,
    ) -> Result<Self> {
        let support: Vec<Vec<usize>> = tuples(&input_sizes).into_iter().filter(|t| promise(t)).collect();
        if support.is_empty() {
            return Err(Error::InvalidDistribution("promise admits no input".into()));
        }
        let w = 1.0 / support.len() as f64;
        let distribution = support.into_iter().map(|t| (t, w)).collect();
        GameSpec::new(name, input_sizes, output_sizes, promise, win, distribution)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn parties(&self) -> usize {
        self.input_sizes.len()
    }

    pub fn input_sizes(&self) -> &[usize] {
        &self.input_sizes
    }

    pub fn output_sizes(&self) -> &[usize] {
        &self.output_sizes
    }

    pub fn distribution(&self) -> &[(Vec<usize>, f64)] {
        &self.distribution
    }

    pub fn promise_holds(&self, inputs: &[usize]) -> bool {
        (self.promise)(inputs)
    }

    pub fn wins(&self, inputs: &[usize], outputs: &[usize]) -> bool {
        (self.win)(inputs, outputs)
    }
}

/// Anything that induces, for each joint input, a distribution over joint
/// outputs.
pub trait Strategy {
    /// `(outputs, probability)` pairs for the given joint input.
    fn outcome_distribution(&self, game: &GameSpec, inputs: &[usize]) -> Result<Vec<(Vec<usize>, f64)>>;
    fn describe(&self) -> String;
}

/// One lookup table per party, mapping input to output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeterministicStrategy {
    pub tables: Vec<Vec<usize>>,
}

impl DeterministicStrategy {
    pub fn new(tables: Vec<Vec<usize>>) -> Self {
        DeterministicStrategy { tables }
    }

    /// Constant outputs regardless of input.
    pub fn constant(game: &GameSpec, outputs: &[usize]) -> Self {
        DeterministicStrategy {
            tables: game.input_sizes.iter().zip(outputs).map(|(&n, &o)| vec![o; n]).collect(),
        }
    }

    pub fn output(&self, party: usize, input: usize) -> usize {
        self.tables[party][input]
    }

    /// Concatenated tables, party by party in input order. Lexicographic order
    /// on this encoding is the tie-break order of [`best_classical`].
    pub fn encoding(&self) -> Vec<usize> {
        self.tables.concat()
    }

    /// The strategy with the given rank in encoding order.
    pub fn from_index(game: &GameSpec, mut index: u64) -> Self {
        let mut tables: Vec<Vec<usize>> = game.input_sizes.iter().map(|&n| vec![0; n]).collect();
        for (party, table) in tables.iter_mut().enumerate().rev() {
            let radix = game.output_sizes[party] as u64;
            for slot in table.iter_mut().rev() {
                *slot = (index % radix) as usize;
                index /= radix;
            }
        }
        DeterministicStrategy { tables }
    }

    pub fn check(&self, game: &GameSpec) -> Result<()> {
        if self.tables.len() != game.parties() {
            return Err(Error::AlphabetMismatch(format!(
                "strategy has {} parties, game has {}",
                self.tables.len(),
                game.parties()
            )));
        }
        for (p, t) in self.tables.iter().enumerate() {
            if t.len() != game.input_sizes[p] {
                return Err(Error::AlphabetMismatch(format!("party {p} table covers {} inputs", t.len())));
            }
            if let Some(o) = t.iter().find(|&&o| o >= game.output_sizes[p]) {
                return Err(Error::AlphabetMismatch(format!("party {p} outputs {o}")));
            }
        }
        Ok(())
    }

    fn value_unchecked(&self, game: &GameSpec) -> f64 {
        let mut outputs = vec![0; game.parties()];
        let mut v = 0.0;
        for (inputs, w) in &game.distribution {
            for (p, o) in outputs.iter_mut().enumerate() {
                *o = self.tables[p][inputs[p]];
            }
            if game.wins(inputs, &outputs) {
                v += w;
            }
        }
        v
    }
}

impl Strategy for DeterministicStrategy {
    fn outcome_distribution(&self, game: &GameSpec, inputs: &[usize]) -> Result<Vec<(Vec<usize>, f64)>> {
        self.check(game)?;
        let outputs = inputs.iter().enumerate().map(|(p, &x)| self.tables[p][x]).collect();
        Ok(vec![(outputs, 1.0)])
    }

    fn describe(&self) -> String {
        format!("deterministic {:?}", self.tables)
    }
}

/// Shared state plus, per party and input, a sequence of projective
/// measurements on that party's register. A party's output combines its
/// measurement labels in mixed radix, first measurement most significant.
#[derive(Clone, Debug)]
pub struct QuantumStrategy {
    state: StateVector,
    registers: Vec<Vec<usize>>,
    measurements: Vec<Vec<Vec<ProjectiveMeasurement>>>,
    description: String,
}

impl QuantumStrategy {
    pub fn new(
        state: StateVector,
        registers: Vec<Vec<usize>>,
        measurements: Vec<Vec<Vec<ProjectiveMeasurement>>>,
        description: impl Into<String>,
    ) -> Result<Self> {
        if registers.len() != measurements.len() {
            return Err(Error::AlphabetMismatch("one register and measurement map per party".into()));
        }
        let mut owner = vec![None; state.qubits()];
        for (p, reg) in registers.iter().enumerate() {
            for &q in reg {
                match owner.get_mut(q) {
                    None => {
                        return Err(Error::TargetOutOfRange {
                            index: q,
                            qubits: state.qubits(),
                        })
                    }
                    Some(Some(_)) => return Err(Error::DuplicateTarget(q)),
                    Some(slot) => *slot = Some(p),
                }
            }
        }
        for (p, per_input) in measurements.iter().enumerate() {
            let dim = 1usize << registers[p].len();
            for m in per_input.iter().flatten() {
                if m.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        actual: m.dim(),
                    });
                }
            }
        }
        Ok(QuantumStrategy {
            state,
            registers,
            measurements,
            description: description.into(),
        })
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn registers(&self) -> &[Vec<usize>] {
        &self.registers
    }

    pub fn parties(&self) -> usize {
        self.registers.len()
    }

    /// Number of distinct outputs party `p` can produce on input `x`.
    pub fn output_count(&self, p: usize, x: usize) -> usize {
        self.measurements[p][x].iter().map(|m| m.label_count()).product()
    }

    /// Same strategy with two parties' roles exchanged.
    pub fn swap_parties(&self, p: usize, q: usize) -> Self {
        let mut s = self.clone();
        s.registers.swap(p, q);
        s.measurements.swap(p, q);
        s
    }

    fn check(&self, game: &GameSpec) -> Result<()> {
        if self.parties() != game.parties() {
            return Err(Error::AlphabetMismatch(format!(
                "strategy has {} parties, game has {}",
                self.parties(),
                game.parties()
            )));
        }
        for p in 0..self.parties() {
            if self.measurements[p].len() != game.input_sizes[p] {
                return Err(Error::AlphabetMismatch(format!(
                    "party {p} has measurements for {} inputs",
                    self.measurements[p].len()
                )));
            }
            for x in 0..game.input_sizes[p] {
                if self.output_count(p, x) > game.output_sizes[p] {
                    return Err(Error::AlphabetMismatch(format!("party {p} on input {x} has too many outcomes")));
                }
            }
        }
        Ok(())
    }

    /// Exact joint output distribution for one joint input, sorted by output
    /// tuple.
    pub fn joint_distribution(&self, inputs: &[usize]) -> Result<Vec<(Vec<usize>, f64)>> {
        if inputs.len() != self.parties() {
            return Err(Error::AlphabetMismatch(format!("{} inputs for {} parties", inputs.len(), self.parties())));
        }
        let mut branches = vec![(self.state.clone(), 1.0, vec![0usize; self.parties()])];
        for (p, &x) in inputs.iter().enumerate() {
            let seq = self
                .measurements
                .get(p)
                .and_then(|m| m.get(x))
                .ok_or_else(|| Error::AlphabetMismatch(format!("party {p} has no measurement for input {x}")))?;
            for m in seq {
                let radix = m.label_count();
                let mut next = Vec::with_capacity(branches.len() * m.len());
                for (state, weight, outs) in branches {
                    for e in state.measure(m, &self.registers[p])?.entries {
                        if let Some(post) = e.state {
                            let mut o = outs.clone();
                            o[p] = o[p] * radix + e.label;
                            next.push((post, weight * e.probability, o));
                        }
                    }
                }
                branches = next;
            }
        }
        let mut agg: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (_, w, o) in branches {
            *agg.entry(o).or_insert(0.0) += w;
        }
        Ok(agg.into_iter().collect())
    }
}

impl Strategy for QuantumStrategy {
    fn outcome_distribution(&self, game: &GameSpec, inputs: &[usize]) -> Result<Vec<(Vec<usize>, f64)>> {
        self.check(game)?;
        self.joint_distribution(inputs)
    }

    fn describe(&self) -> String {
        self.description.clone()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InputWin {
    pub inputs: Vec<usize>,
    pub weight: f64,
    pub win_probability: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GameReport {
    pub game: String,
    pub win_probability: f64,
    pub per_input: Vec<InputWin>,
    pub strategy: String,
}

/// Exact winning probability: input weights times outcome probabilities.
pub fn eval_exact<S: Strategy + ?Sized>(game: &GameSpec, strategy: &S) -> Result<GameReport> {
    let mut per_input = Vec::with_capacity(game.distribution.len());
    let mut total = 0.0;
    for (inputs, w) in &game.distribution {
        let dist = strategy.outcome_distribution(game, inputs)?;
        let mass: f64 = dist.iter().map(|(_, p)| p).sum();
        if (mass - 1.0).abs() > CONTRACT_TOL {
            return Err(Error::InvalidDistribution(format!("outcomes on {inputs:?} sum to {mass}")));
        }
        let win: f64 = dist
            .iter()
            .filter(|(o, _)| game.wins(inputs, o))
            .map(|(_, p)| p)
            .sum();
        let win = win.clamp(0.0, 1.0);
        total += w * win;
        per_input.push(InputWin {
            inputs: inputs.clone(),
            weight: *w,
            win_probability: win,
        });
    }
    Ok(GameReport {
        game: game.name.clone(),
        win_probability: total.clamp(0.0, 1.0),
        per_input,
        strategy: strategy.describe(),
    })
}

/// `Π_p |outputs_p|^{|inputs_p|}`.
pub fn strategy_space_size(game: &GameSpec) -> f64 {
    game.input_sizes
        .iter()
        .zip(&game.output_sizes)
        .map(|(&i, &o)| (o as f64).powi(i as i32))
        .product()
}

/// Exhaustive optimum over deterministic strategies. By convexity this is
/// also the optimum over shared-randomness strategies. Ties go to the
/// smallest encoding.
pub fn best_classical(game: &GameSpec, exec: Execution) -> Result<(f64, DeterministicStrategy)> {
    let size = strategy_space_size(game);
    if size > MAX_STRATEGY_SPACE {
        return Err(Error::SearchSpaceTooLarge {
            size,
            limit: MAX_STRATEGY_SPACE,
        });
    }
    let total = size as u64;
    let chunk = (total / 64).max(4096);
    let partial = par::map_chunks(exec, total, chunk, |start, end| {
        let mut best = (f64::NEG_INFINITY, start);
        for idx in start..end {
            let v = DeterministicStrategy::from_index(game, idx).value_unchecked(game);
            if v > best.0 + TIE_MARGIN {
                best = (v, idx);
            }
        }
        best
    });
    let mut best = (f64::NEG_INFINITY, 0);
    for b in partial {
        if b.0 > best.0 + TIE_MARGIN {
            best = b;
        }
    }
    Ok((best.0, DeterministicStrategy::from_index(game, best.1)))
}
