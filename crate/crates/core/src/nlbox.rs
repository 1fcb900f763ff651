//! Non-local (PR) boxes and the van Dam share protocol.
//!
//! A box is a one-shot resource: querying it twice is an error. Noisy boxes
//! keep `a` uniform and flip `b` with probability `1 − p`.

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::bell::{CorrelationTable, Shape};
use crate::bits::Bits;
use crate::ccproto::{Channel, Party, ProtocolResult};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Box parameter above which noisy boxes are known to collapse communication
/// complexity; reported as a reference line only.
pub fn collapse_threshold() -> f64 {
    (3.0 + 6f64.sqrt()) / 6.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PRBox {
    id: usize,
    p: f64,
    consumed: bool,
}

impl PRBox {
    pub fn new(id: usize, p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(PRBox { id, p, consumed: false })
    }

    pub fn perfect(id: usize) -> Self {
        PRBox {
            id,
            p: 1.0,
            consumed: false,
        }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn is_consumed(&self) -> bool {
        self.consumed
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.5..=1.0).contains(&p) {
        return Err(Error::param("p", format!("{p} is outside [1/2, 1]")));
    }
    Ok(())
}

/// Queries a box with Alice's input `x` and Bob's input `y`. Exactly two
/// uniforms are drawn per query so that runs at different `p` stay coupled.
pub fn pr_box_query(pr: &mut PRBox, x: bool, y: bool, rng: &mut SeededRng) -> Result<(bool, bool)> {
    if pr.consumed {
        return Err(Error::BoxReused(pr.id));
    }
    pr.consumed = true;
    let a = rng.uniform() < 0.5;
    let flip = rng.uniform() >= pr.p;
    Ok((a, a ^ (x & y) ^ flip))
}

/// Hands out fresh boxes with distinct ids and counts how many were used.
#[derive(Clone, Debug)]
pub struct BoxSupply {
    p: f64,
    issued: usize,
}

impl BoxSupply {
    pub fn new(p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(BoxSupply { p, issued: 0 })
    }

    pub fn fresh(&mut self) -> PRBox {
        self.issued += 1;
        PRBox {
            id: self.issued - 1,
            p: self.p,
            consumed: false,
        }
    }

    pub fn issued(&self) -> usize {
        self.issued
    }
}

/// Exact PR table: `P(a,b|x,y) = p/2` if `a ⊕ b = x ∧ y`, else `(1 − p)/2`.
pub fn pr_correlation_table_generic<T>(p: T) -> Result<CorrelationTable<T>>
where
    T: Clone + Signed + PartialOrd + ToPrimitive,
{
    if p < T::one() / (T::one() + T::one()) || p > T::one() {
        return Err(Error::param("p", "outside [1/2, 1]"));
    }
    let two = T::one() + T::one();
    let hit = p.clone() / two.clone();
    let miss = (T::one() - p) / two;
    CorrelationTable::from_fn(Shape::new(2, 2, 2, 2), |x, y, a, b| {
        if a ^ b == x & y {
            hit.clone()
        } else {
            miss.clone()
        }
    })
}

pub fn pr_correlation_table(p: f64) -> Result<CorrelationTable<f64>> {
    pr_correlation_table_generic(p)
}

/// A wire: Alice's input `x_i`, Bob's input `y_i` (1-based) or gate `g_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Wire {
    X(usize),
    Y(usize),
    Gate(usize),
}

impl fmt::Display for Wire {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Wire::X(i) => write!(f, "x{i}"),
            Wire::Y(i) => write!(f, "y{i}"),
            Wire::Gate(k) => write!(f, "g{k}"),
        }
    }
}

impl FromStr for Wire {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad wire label {s:?}"));
        let (head, tail) = s.split_at_checked(1).ok_or_else(bad)?;
        let k: usize = tail.parse().map_err(|_| bad())?;
        match head {
            "x" => Ok(Wire::X(k)),
            "y" => Ok(Wire::Y(k)),
            "g" => Ok(Wire::Gate(k)),
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for Wire {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Wire> for String {
    fn from(w: Wire) -> String {
        w.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Gate {
    Not { src: Wire },
    And { lhs: Wire, rhs: Wire },
}

/// NOT/AND circuit over `x_1..x_n` (Alice) and `y_1..y_n` (Bob). Gates are
/// topologically ordered and `g_k` names the output of gate `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCircuit")]
pub struct BooleanCircuit {
    n: usize,
    gates: Vec<Gate>,
    output: Wire,
}

#[derive(Deserialize)]
struct RawCircuit {
    n: usize,
    gates: Vec<Gate>,
    output: Wire,
}

impl TryFrom<RawCircuit> for BooleanCircuit {
    type Error = Error;

    fn try_from(r: RawCircuit) -> Result<Self> {
        BooleanCircuit::new(r.n, r.gates, r.output)
    }
}

impl BooleanCircuit {
    pub fn new(n: usize, gates: Vec<Gate>, output: Wire) -> Result<Self> {
        let check = |w: Wire, before: usize| -> Result<()> {
            let ok = match w {
                Wire::X(i) | Wire::Y(i) => (1..=n).contains(&i),
                Wire::Gate(k) => k < before,
            };
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidCircuit(format!("wire {w} is undefined at this point")))
            }
        };
        for (k, g) in gates.iter().enumerate() {
            match *g {
                Gate::Not { src } => check(src, k)?,
                Gate::And { lhs, rhs } => {
                    check(lhs, k)?;
                    check(rhs, k)?;
                }
            }
        }
        check(output, gates.len())?;
        Ok(BooleanCircuit { n, gates, output })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serializes")
    }

    /// `x_1 ∧ y_1`.
    pub fn single_and() -> Self {
        BooleanCircuit {
            n: 1,
            gates: vec![Gate::And {
                lhs: Wire::X(1),
                rhs: Wire::Y(1),
            }],
            output: Wire::Gate(0),
        }
    }

    /// Inner product mod 2 built from AND and NOT gates.
    pub fn inner_product(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "must be positive"));
        }
        let mut gates = Vec::new();
        let mut acc: Option<Wire> = None;
        for i in 1..=n {
            gates.push(Gate::And {
                lhs: Wire::X(i),
                rhs: Wire::Y(i),
            });
            let term = Wire::Gate(gates.len() - 1);
            acc = Some(match acc {
                None => term,
                Some(prev) => push_xor(&mut gates, prev, term),
            });
        }
        BooleanCircuit::new(n, gates, acc.expect("n > 0"))
    }

    /// Random circuit with exactly `ands` AND gates and up to `nots` NOT
    /// gates interleaved; the output is the last gate.
    pub fn random(n: usize, ands: usize, nots: usize, rng: &mut SeededRng) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "must be positive"));
        }
        let mut kinds: Vec<bool> = std::iter::repeat_n(true, ands).chain(std::iter::repeat_n(false, nots)).collect();
        rng.shuffle(&mut kinds);
        let mut gates = Vec::with_capacity(kinds.len());
        let pick = |gates: &Vec<Gate>, rng: &mut SeededRng| {
            let pool = 2 * n + gates.len();
            let r = rng.below(pool);
            if r < n {
                Wire::X(r + 1)
            } else if r < 2 * n {
                Wire::Y(r - n + 1)
            } else {
                Wire::Gate(r - 2 * n)
            }
        };
        for is_and in kinds {
            let g = if is_and {
                Gate::And {
                    lhs: pick(&gates, rng),
                    rhs: pick(&gates, rng),
                }
            } else {
                Gate::Not { src: pick(&gates, rng) }
            };
            gates.push(g);
        }
        let output = if gates.is_empty() { Wire::X(1) } else { Wire::Gate(gates.len() - 1) };
        BooleanCircuit::new(n, gates, output)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> Wire {
        self.output
    }

    pub fn and_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::And { .. })).count()
    }

    fn check_inputs(&self, x: &Bits, y: &Bits) -> Result<()> {
        if x.len() != self.n || y.len() != self.n {
            return Err(Error::LengthMismatch(self.n, x.len().max(y.len())));
        }
        Ok(())
    }

    /// Plain evaluation of every wire.
    pub fn evaluate(&self, x: &Bits, y: &Bits) -> Result<bool> {
        self.check_inputs(x, y)?;
        let mut vals = Vec::with_capacity(self.gates.len());
        let read = |w: Wire, vals: &Vec<bool>| match w {
            Wire::X(i) => x.get(i - 1),
            Wire::Y(i) => y.get(i - 1),
            Wire::Gate(k) => vals[k],
        };
        for g in &self.gates {
            let v = match *g {
                Gate::Not { src } => !read(src, &vals),
                Gate::And { lhs, rhs } => read(lhs, &vals) & read(rhs, &vals),
            };
            vals.push(v);
        }
        Ok(read(self.output, &vals))
    }
}

/// `a ⊕ b = ¬(¬(a ∧ ¬b) ∧ ¬(¬a ∧ b))`.
fn push_xor(gates: &mut Vec<Gate>, a: Wire, b: Wire) -> Wire {
    let mut push = |g: Gate| {
        gates.push(g);
        Wire::Gate(gates.len() - 1)
    };
    let nb = push(Gate::Not { src: b });
    let na = push(Gate::Not { src: a });
    let l = push(Gate::And { lhs: a, rhs: nb });
    let r = push(Gate::And { lhs: na, rhs: b });
    let nl = push(Gate::Not { src: l });
    let nr = push(Gate::Not { src: r });
    let both = push(Gate::And { lhs: nl, rhs: nr });
    push(Gate::Not { src: both })
}

/// Alice's and Bob's shares of one wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ShareState {
    pub alice: bool,
    pub bob: bool,
}

impl ShareState {
    pub fn value(&self) -> bool {
        self.alice ^ self.bob
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VanDamRun {
    pub result: ProtocolResult<bool>,
    /// Shares after each gate, in gate order.
    pub shares: Vec<ShareState>,
}

/// Evaluates `c` on split inputs with fresh boxes from `supply`. Input wires
/// start as `(x_i, 0)` and `(0, y_i)`; each AND consumes two boxes; Alice
/// finally sends her output share and Bob outputs the XOR.
pub fn vandam_run(c: &BooleanCircuit, x: &Bits, y: &Bits, supply: &mut BoxSupply, rng: &mut SeededRng) -> Result<VanDamRun> {
    c.check_inputs(x, y)?;
    let mut alice: Vec<bool> = Vec::with_capacity(c.gates.len());
    let mut bob: Vec<bool> = Vec::with_capacity(c.gates.len());
    let share = |w: Wire, alice: &Vec<bool>, bob: &Vec<bool>| match w {
        Wire::X(i) => (x.get(i - 1), false),
        Wire::Y(i) => (false, y.get(i - 1)),
        Wire::Gate(k) => (alice[k], bob[k]),
    };
    let start = supply.issued();
    for g in &c.gates {
        let (sa, sb) = match *g {
            Gate::Not { src } => {
                let (a1, a2) = share(src, &alice, &bob);
                (!a1, a2)
            }
            Gate::And { lhs, rhs } => {
                let (a1, a2) = share(lhs, &alice, &bob);
                let (b1, b2) = share(rhs, &alice, &bob);
                let (d1, d2) = pr_box_query(&mut supply.fresh(), a1, b2, rng)?;
                let (e1, e2) = pr_box_query(&mut supply.fresh(), b1, a2, rng)?;
                ((a1 & b1) ^ d1 ^ e1, (a2 & b2) ^ d2 ^ e2)
            }
        };
        alice.push(sa);
        bob.push(sb);
    }
    let (out_a, out_b) = share(c.output, &alice, &bob);
    let mut ch = Channel::new();
    ch.use_boxes((supply.issued() - start) as u64);
    ch.send_bits(Party::Alice, format!("output share {}", u8::from(out_a)), 1);
    let output = out_a ^ out_b;
    let truth = c.evaluate(x, y)?;
    let exact = (supply.p == 1.0).then_some(1.0);
    let shares = alice.into_iter().zip(bob).map(|(alice, bob)| ShareState { alice, bob }).collect();
    Ok(VanDamRun {
        result: ch.finish(output, Some(output == truth), exact),
        shares,
    })
}

pub fn vandam_eval(c: &BooleanCircuit, x: &Bits, y: &Bits, p: f64, rng: &mut SeededRng) -> Result<ProtocolResult<bool>> {
    Ok(vandam_run(c, x, y, &mut BoxSupply::new(p)?, rng)?.result)
}

/// Closed-form success of the single-AND circuit: both boxes err or neither.
pub fn single_and_success(p: f64) -> f64 {
    p * p + (1.0 - p) * (1.0 - p)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoisySuccess {
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
    /// Binomial standard error of `rate`.
    pub std_error: f64,
}

impl NoisySuccess {
    /// `z` standard errors.
    pub fn radius(&self, z: f64) -> f64 {
        z * self.std_error
    }
}

/// Monte Carlo success of the van Dam protocol on uniformly random inputs.
pub fn noisy_vandam_success(c: &BooleanCircuit, p: f64, trials: usize, rng: &mut SeededRng) -> Result<NoisySuccess> {
    check_p(p)?;
    if trials == 0 {
        return Err(Error::param("trials", "must be positive"));
    }
    let mut successes = 0;
    for _ in 0..trials {
        let x = Bits::random(c.n, rng);
        let y = Bits::random(c.n, rng);
        let mut supply = BoxSupply::new(p)?;
        if vandam_run(c, &x, &y, &mut supply, rng)?.result.correct == Some(true) {
            successes += 1;
        }
    }
    let rate = successes as f64 / trials as f64;
    Ok(NoisySuccess {
        trials,
        successes,
        rate,
        std_error: (rate * (1.0 - rate) / trials as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::{no_signalling_check, BellExpression};

    #[test]
    fn perfect_box_parity() {
        let mut rng = SeededRng::new(1);
        for _ in 0..200 {
            let (a, b) = pr_box_query(&mut PRBox::perfect(0), true, true, &mut rng).unwrap();
            assert!(a ^ b);
        }
    }

    #[test]
    fn box_is_one_shot() {
        let mut rng = SeededRng::new(1);
        let mut pr = PRBox::new(7, 0.9).unwrap();
        pr_box_query(&mut pr, false, true, &mut rng).unwrap();
        assert!(matches!(pr_box_query(&mut pr, false, true, &mut rng), Err(Error::BoxReused(7))));
        assert!(PRBox::new(0, 0.4).is_err());
    }

    #[test]
    fn table_values() {
        let t = pr_correlation_table(1.0).unwrap();
        assert_eq!(*t.get(1, 1, 0, 1), 0.5);
        assert_eq!(*t.get(1, 1, 0, 0), 0.0);
        assert!(no_signalling_check(&t).exact_zero);
        let chsh = BellExpression::<f64>::chsh();
        assert!((chsh.evaluate(&t).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn single_and_shares() {
        let c = BooleanCircuit::single_and();
        let mut rng = SeededRng::new(4);
        for xi in [false, true] {
            for yi in [false, true] {
                let (x, y) = (Bits::new(vec![xi]), Bits::new(vec![yi]));
                let run = vandam_run(&c, &x, &y, &mut BoxSupply::new(1.0).unwrap(), &mut rng).unwrap();
                assert_eq!(run.result.output, xi & yi);
                assert_eq!(run.result.ledger.nl_boxes, 2);
                assert_eq!(run.result.ledger.classical_bits, 1);
                assert_eq!(run.shares[0].value(), xi & yi);
            }
        }
    }

    #[test]
    fn not_only_needs_no_boxes() {
        let c = BooleanCircuit::new(1, vec![Gate::Not { src: Wire::X(1) }], Wire::Gate(0)).unwrap();
        let r = vandam_eval(&c, &Bits::new(vec![true]), &Bits::new(vec![false]), 1.0, &mut SeededRng::new(0)).unwrap();
        assert!(!r.output);
        assert_eq!(r.ledger.nl_boxes, 0);
        assert_eq!(r.correct, Some(true));
    }

    #[test]
    fn circuit_json_round_trip() {
        let c = BooleanCircuit::inner_product(3).unwrap();
        let back = BooleanCircuit::from_json(&c.to_json()).unwrap();
        assert_eq!(c, back);
        let bad = r#"{"n":1,"gates":[{"op":"not","src":"g0"}],"output":"g0"}"#;
        assert!(BooleanCircuit::from_json(bad).is_err());
        let bad_label = r#"{"n":1,"gates":[],"output":"z1"}"#;
        assert!(BooleanCircuit::from_json(bad_label).is_err());
    }

    #[test]
    fn inner_product_circuit() {
        let c = BooleanCircuit::inner_product(3).unwrap();
        for xi in 0..8 {
            for yi in 0..8 {
                let (x, y) = (Bits::from_index(xi, 3), Bits::from_index(yi, 3));
                assert_eq!(c.evaluate(&x, &y).unwrap(), (xi & yi).count_ones() % 2 == 1);
            }
        }
    }
}
