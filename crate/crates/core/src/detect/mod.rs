//! Detection-efficiency models: local hidden variables with no-click events,
//! the conversation-catalog conversion, the asymmetric one-way construction
//! and LP feasibility of inefficient-detector models.

mod asym;
mod feasibility;
pub mod simplex;

pub use asym::{asym_lhv_to_oneway, pr_toy_lhv, AsymOneWay};
pub use feasibility::{
    efficiency_sweep, efficiency_threshold, lhv_feasibility, quantum_chsh_table, FarkasCertificate, Feasibility,
    LocalMixture, LocalStrategy, Threshold,
};

use serde::Serialize;

use crate::bell::{CorrelationTable, Shape};
use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// `None` is the no-click outcome ⊥.
pub type Response = Option<usize>;

/// Finite hidden-variable model whose parties may answer ⊥.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LhvModel {
    weights: Vec<f64>,
    /// `alice[λ][x]`.
    alice: Vec<Vec<Response>>,
    /// `bob[λ][y]`.
    bob: Vec<Vec<Response>>,
    outputs_a: usize,
    outputs_b: usize,
    /// Declared efficiency target.
    efficiency: f64,
}

impl LhvModel {
    pub fn new(
        weights: Vec<f64>,
        alice: Vec<Vec<Response>>,
        bob: Vec<Vec<Response>>,
        outputs: (usize, usize),
        efficiency: f64,
    ) -> Result<Self> {
        let k = weights.len();
        if k == 0 || alice.len() != k || bob.len() != k {
            return Err(Error::InvalidInstance("one response row per hidden value is required".into()));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution("hidden-variable weights must be a distribution".into()));
        }
        let (ia, ib) = (alice[0].len(), bob[0].len());
        let total = alice.iter().all(|r| r.len() == ia) && bob.iter().all(|r| r.len() == ib);
        let in_range = alice.iter().flatten().flatten().all(|&a| a < outputs.0)
            && bob.iter().flatten().flatten().all(|&b| b < outputs.1);
        if !total || !in_range || ia == 0 || ib == 0 {
            return Err(Error::InvalidInstance("responses must be total and within the output alphabets".into()));
        }
        if !(0.0..=1.0).contains(&efficiency) {
            return Err(Error::param("efficiency", "must lie in [0, 1]"));
        }
        Ok(LhvModel {
            weights,
            alice,
            bob,
            outputs_a: outputs.0,
            outputs_b: outputs.1,
            efficiency,
        })
    }

    pub fn hidden_values(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn inputs_a(&self) -> usize {
        self.alice[0].len()
    }

    pub fn inputs_b(&self) -> usize {
        self.bob[0].len()
    }

    pub fn outputs(&self) -> (usize, usize) {
        (self.outputs_a, self.outputs_b)
    }

    pub fn efficiency(&self) -> f64 {
        self.efficiency
    }

    pub fn alice_response(&self, lambda: usize, x: usize) -> Response {
        self.alice[lambda][x]
    }

    pub fn bob_response(&self, lambda: usize, y: usize) -> Response {
        self.bob[lambda][y]
    }

    /// `P(a, b | x, y)` with ⊥ allowed on either side.
    pub fn probability(&self, x: usize, y: usize, a: Response, b: Response) -> f64 {
        (0..self.hidden_values())
            .filter(|&l| self.alice[l][x] == a && self.bob[l][y] == b)
            .map(|l| self.weights[l])
            .sum()
    }

    pub fn alice_click(&self, x: usize) -> f64 {
        (0..self.hidden_values()).filter(|&l| self.alice[l][x].is_some()).map(|l| self.weights[l]).sum()
    }

    pub fn bob_click(&self, y: usize) -> f64 {
        (0..self.hidden_values()).filter(|&l| self.bob[l][y].is_some()).map(|l| self.weights[l]).sum()
    }

    pub fn both_click(&self, x: usize, y: usize) -> f64 {
        (0..self.hidden_values())
            .filter(|&l| self.alice[l][x].is_some() && self.bob[l][y].is_some())
            .map(|l| self.weights[l])
            .sum()
    }

    /// `P(a, b | x, y, both click)`.
    pub fn conditional_table(&self) -> Result<CorrelationTable<f64>> {
        let shape = Shape::new(self.inputs_a(), self.inputs_b(), self.outputs_a, self.outputs_b);
        for x in 0..shape.inputs_a {
            for y in 0..shape.inputs_b {
                if self.both_click(x, y) <= 0.0 {
                    return Err(Error::InvalidInstance(format!("no joint click at inputs ({x}, {y})")));
                }
            }
        }
        CorrelationTable::from_fn(shape, |x, y, a, b| self.probability(x, y, Some(a), Some(b)) / self.both_click(x, y))
    }

    /// Largest change in Alice's response distribution (⊥ included) when
    /// Bob's input changes; zero for every model by construction.
    pub fn alice_signalling(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let responses: Vec<Response> = (0..self.outputs_a).map(Some).chain([None]).collect();
        let bobs: Vec<Response> = (0..self.outputs_b).map(Some).chain([None]).collect();
        for x in 0..self.inputs_a() {
            for &a in &responses {
                let marginal = |y: usize| bobs.iter().map(|&b| self.probability(x, y, a, b)).sum::<f64>();
                let m0 = marginal(0);
                for y in 1..self.inputs_b() {
                    worst = worst.max((marginal(y) - m0).abs());
                }
            }
        }
        worst
    }

    pub fn sample_hidden(&self, rng: &mut SeededRng) -> usize {
        rng.weighted_index(&self.weights)
    }

    pub fn sample(&self, x: usize, y: usize, rng: &mut SeededRng) -> (Response, Response) {
        let l = self.sample_hidden(rng);
        (self.alice[l][x], self.bob[l][y])
    }

    /// `max_{x,y} Σ_{a,b} |P_LHV(a,b|x,y)/η − P(a,b|x,y)|` over clicked
    /// outcomes, with `η` the declared efficiency.
    pub fn efficiency_error(&self, target: &CorrelationTable<f64>) -> Result<f64> {
        self.check_shape(target)?;
        let s = target.shape();
        let mut worst: f64 = 0.0;
        for x in 0..s.inputs_a {
            for y in 0..s.inputs_b {
                let mut d = 0.0;
                for a in 0..s.outputs_a {
                    for b in 0..s.outputs_b {
                        d += (self.probability(x, y, Some(a), Some(b)) / self.efficiency - target.get(x, y, a, b)).abs();
                    }
                }
                worst = worst.max(d);
            }
        }
        Ok(worst)
    }

    pub fn report(&self, target: &CorrelationTable<f64>) -> Result<EfficiencyReport> {
        let conditional = self.conditional_table()?;
        let s = target.shape();
        let mut distance: f64 = 0.0;
        for x in 0..s.inputs_a {
            for y in 0..s.inputs_b {
                let d: f64 = (0..s.outputs_a)
                    .flat_map(|a| (0..s.outputs_b).map(move |b| (a, b)))
                    .map(|(a, b)| (conditional.get(x, y, a, b) - target.get(x, y, a, b)).abs())
                    .sum();
                distance = distance.max(d);
            }
        }
        Ok(EfficiencyReport {
            click_a: (0..self.inputs_a()).map(|x| self.alice_click(x)).collect(),
            click_b: (0..self.inputs_b()).map(|y| self.bob_click(y)).collect(),
            conditional,
            distance,
        })
    }

    fn check_shape(&self, target: &CorrelationTable<f64>) -> Result<()> {
        let s = target.shape();
        if (s.inputs_a, s.inputs_b, s.outputs_a, s.outputs_b)
            != (self.inputs_a(), self.inputs_b(), self.outputs_a, self.outputs_b)
        {
            return Err(Error::ShapeMismatch("model and target alphabets differ".into()));
        }
        Ok(())
    }
}

/// Click statistics of a model against a target table.
#[derive(Clone, Debug, Serialize)]
pub struct EfficiencyReport {
    pub click_a: Vec<f64>,
    pub click_b: Vec<f64>,
    pub conditional: CorrelationTable<f64>,
    /// `max_{x,y} Σ_{a,b} |P(a,b|x,y,clicks) − target|`.
    pub distance: f64,
}

/// One possible conversation and what each party does if it is consistent
/// with its input.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub transcript: Bits,
    /// `alice[x]` is Alice's output when the transcript is consistent with
    /// `x`, otherwise ⊥.
    pub alice: Vec<Response>,
    pub bob: Vec<Response>,
}

/// All `2^c` conversations of a deterministic `c`-bit protocol.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConversationCatalog {
    bits: usize,
    outputs: (usize, usize),
    entries: Vec<CatalogEntry>,
}

impl ConversationCatalog {
    pub fn new(bits: usize, outputs: (usize, usize), entries: Vec<CatalogEntry>) -> Result<Self> {
        if bits >= 20 {
            return Err(Error::param("bits", "catalogs are limited to fewer than 20 bits"));
        }
        let (ia, ib) = match entries.first() {
            Some(e) => (e.alice.len(), e.bob.len()),
            None => return Err(Error::IncompleteCatalog("no conversations".into())),
        };
        for e in &entries {
            if e.transcript.len() != bits || e.alice.len() != ia || e.bob.len() != ib {
                return Err(Error::InvalidInstance(format!("entry {} has the wrong shape", e.transcript)));
            }
        }
        Ok(ConversationCatalog { bits, outputs, entries })
    }

    /// Enumerates a deterministic protocol over all input pairs. `run`
    /// returns the padded `bits`-bit transcript and both outputs.
    pub fn from_protocol(
        bits: usize,
        inputs: (usize, usize),
        outputs: (usize, usize),
        run: impl Fn(usize, usize) -> (Bits, usize, usize),
    ) -> Result<Self> {
        if bits >= 20 {
            return Err(Error::param("bits", "catalogs are limited to fewer than 20 bits"));
        }
        let mut entries: Vec<CatalogEntry> = (0..1usize << bits)
            .map(|r| CatalogEntry {
                transcript: Bits::from_index(r, bits),
                alice: vec![None; inputs.0],
                bob: vec![None; inputs.1],
            })
            .collect();
        let mut seen = vec![vec![usize::MAX; inputs.1]; inputs.0];
        for x in 0..inputs.0 {
            for y in 0..inputs.1 {
                let (t, a, b) = run(x, y);
                if t.len() != bits {
                    return Err(Error::InvalidInstance(format!("transcript {t} is not {bits} bits long")));
                }
                let r = t.to_index();
                seen[x][y] = r;
                let e = &mut entries[r];
                if e.alice[x].is_some_and(|v| v != a) || e.bob[y].is_some_and(|v| v != b) {
                    return Err(Error::InvalidInstance(format!("outputs on transcript {t} are not a function of the local input")));
                }
                e.alice[x] = Some(a);
                e.bob[y] = Some(b);
            }
        }
        // Consistent sets must form rectangles: x ∈ A_r and y ∈ B_r imply (x, y) produces r.
        for (r, e) in entries.iter().enumerate() {
            for x in (0..inputs.0).filter(|&x| e.alice[x].is_some()) {
                for y in (0..inputs.1).filter(|&y| e.bob[y].is_some()) {
                    if seen[x][y] != r {
                        return Err(Error::InvalidInstance(format!("transcript {} is not a rectangle", e.transcript)));
                    }
                }
            }
        }
        ConversationCatalog::new(bits, outputs, entries)
    }

    /// Alice sends `x ∈ {0,1}^n` verbatim and outputs 0; Bob outputs `f(x, y)`.
    pub fn send_input(n: usize, outputs_b: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let size = 1usize << n;
        ConversationCatalog::from_protocol(n, (size, size), (1, outputs_b), |x, y| (Bits::from_index(x, n), 0, f(x, y)))
    }

    /// Protocol without communication: a single empty conversation.
    pub fn no_communication(
        inputs: (usize, usize),
        outputs: (usize, usize),
        fa: impl Fn(usize) -> usize,
        fb: impl Fn(usize) -> usize,
    ) -> Result<Self> {
        ConversationCatalog::from_protocol(0, inputs, outputs, |x, y| (Bits::zeros(0), fa(x), fb(y)))
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    /// Output pair of the conversation consistent with both inputs.
    pub fn outcome(&self, x: usize, y: usize) -> Option<(usize, usize)> {
        self.entries.iter().find_map(|e| Some((e.alice[x]?, e.bob[y]?)))
    }
}

/// Hidden variable uniform over all `2^c` conversations; each party outputs
/// what the conversation dictates if it is consistent with its input and ⊥
/// otherwise. Both parties click with probability at least `2^{−c}`.
pub fn protocol_to_lhv(catalog: &ConversationCatalog) -> Result<LhvModel> {
    let c = catalog.bits;
    if catalog.entries.len() != 1usize << c {
        return Err(Error::IncompleteCatalog(format!(
            "{} of {} conversations listed",
            catalog.entries.len(),
            1usize << c
        )));
    }
    let (ia, ib) = (catalog.entries[0].alice.len(), catalog.entries[0].bob.len());
    for x in 0..ia {
        for y in 0..ib {
            if catalog.outcome(x, y).is_none() {
                return Err(Error::IncompleteCatalog(format!("no conversation covers inputs ({x}, {y})")));
            }
        }
    }
    let w = 1.0 / (1u64 << c) as f64;
    LhvModel::new(
        vec![w; 1 << c],
        catalog.entries.iter().map(|e| e.alice.clone()).collect(),
        catalog.entries.iter().map(|e| e.bob.clone()).collect(),
        catalog.outputs,
        w.sqrt(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_bit_protocol() {
        // Alice sends x1; Bob outputs it.
        let cat = ConversationCatalog::send_input(1, 2, |x, _| x).unwrap();
        let lhv = protocol_to_lhv(&cat).unwrap();
        assert_eq!(lhv.hidden_values(), 2);
        for x in 0..2 {
            assert_eq!(lhv.alice_click(x), 0.5);
            for y in 0..2 {
                assert_eq!(lhv.both_click(x, y), 0.5);
                assert_eq!(lhv.bob_click(y), 1.0);
                let t = lhv.conditional_table().unwrap();
                assert_eq!(*t.get(x, y, 0, x), 1.0);
            }
        }
        assert_eq!(lhv.alice_signalling(), 0.0);
    }

    #[test]
    fn silent_protocol_always_clicks() {
        let cat = ConversationCatalog::no_communication((2, 2), (2, 2), |x| x, |y| 1 - y).unwrap();
        let lhv = protocol_to_lhv(&cat).unwrap();
        assert_eq!(lhv.hidden_values(), 1);
        assert_eq!(lhv.both_click(1, 0), 1.0);
        assert_eq!(*lhv.conditional_table().unwrap().get(1, 0, 1, 1), 1.0);
    }

    #[test]
    fn incomplete_catalog_is_rejected() {
        let entries = vec![CatalogEntry {
            transcript: Bits::from_index(0, 1),
            alice: vec![Some(0), None],
            bob: vec![Some(0), Some(0)],
        }];
        let cat = ConversationCatalog::new(1, (1, 1), entries).unwrap();
        assert!(matches!(protocol_to_lhv(&cat), Err(Error::IncompleteCatalog(_))));
    }

    #[test]
    fn non_protocol_is_rejected() {
        // Transcript depends jointly on x and y in a non-rectangular way.
        let r = ConversationCatalog::from_protocol(1, (2, 2), (1, 1), |x, y| (Bits::from_index(x ^ y, 1), 0, 0));
        assert!(r.is_err());
    }
}
