use serde::ser::{Serialize, SerializeStruct, Serializer};

use super::{log2_exact, Channel, CostLedger, Party, ProtocolResult};
use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::field::ceil_log2;
use crate::qstate::{Operator, ProjectiveMeasurement, StateVector, ONE, ZERO};
use crate::rng::SeededRng;

/// Perfect matching on `n` points. Indices are 0-based in the API and
/// 1-based in serialized form and in answers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingSpec {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl Serialize for MatchingSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("MatchingSpec", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("pairs", &self.one_based())?;
        st.end()
    }
}

impl MatchingSpec {
    pub fn new(n: usize, pairs: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 || n % 2 == 1 {
            return Err(Error::InvalidMatching(format!("n = {n} must be even and positive")));
        }
        if pairs.len() != n / 2 {
            return Err(Error::InvalidMatching(format!("{} pairs for n = {n}", pairs.len())));
        }
        let mut seen = vec![false; n];
        for &(i, j) in &pairs {
            for k in [i, j] {
                if k >= n {
                    return Err(Error::InvalidMatching(format!("index {} out of range", k + 1)));
                }
                if seen[k] {
                    return Err(Error::InvalidMatching(format!("index {} used twice", k + 1)));
                }
                seen[k] = true;
            }
        }
        Ok(MatchingSpec { n, pairs })
    }

    pub fn from_one_based(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if pairs.iter().any(|&(i, j)| i == 0 || j == 0) {
            return Err(Error::InvalidMatching("indices are 1-based".into()));
        }
        MatchingSpec::new(n, pairs.iter().map(|&(i, j)| (i - 1, j - 1)).collect())
    }

    /// `(1,2), (3,4), …`.
    pub fn adjacent(n: usize) -> Result<Self> {
        MatchingSpec::new(n, (0..n / 2).map(|k| (2 * k, 2 * k + 1)).collect())
    }

    /// `(1, n/2+1), (2, n/2+2), …`.
    pub fn halves(n: usize) -> Result<Self> {
        MatchingSpec::new(n, (0..n / 2).map(|k| (k, k + n / 2)).collect())
    }

    /// Uniformly random perfect matching.
    pub fn random(n: usize, rng: &mut SeededRng) -> Result<Self> {
        let mut idx: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut idx);
        MatchingSpec::new(n, idx.chunks(2).map(|c| (c[0].min(c[1]), c[0].max(c[1]))).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn one_based(&self) -> Vec<(usize, usize)> {
        self.pairs.iter().map(|&(i, j)| (i + 1, j + 1)).collect()
    }

    fn check_for(&self, x: &Bits) -> Result<usize> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch(x.len(), self.n));
        }
        log2_exact(self.n, "n")
    }
}

/// `(i, j, x_i ⊕ x_j)` with 1-based `i, j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct HmAnswer {
    pub i: usize,
    pub j: usize,
    pub parity: u8,
}

impl HmAnswer {
    pub fn is_correct(&self, x: &Bits, m: &MatchingSpec) -> bool {
        let pair = (self.i.wrapping_sub(1), self.j.wrapping_sub(1));
        m.pairs.contains(&pair) && self.parity == u8::from(x.get(pair.0) ^ x.get(pair.1))
    }
}

fn alice_message(m: usize, x: &Bits) -> Result<StateVector> {
    Ok(StateVector::uniform(m)?.apply_sign(|i| x.get(i)))
}

fn pair_measurement(matching: &MatchingSpec) -> Result<ProjectiveMeasurement> {
    let n = matching.n;
    let projectors = matching
        .pairs
        .iter()
        .map(|&(i, j)| {
            let mut p = Operator::zeros(n);
            p.set(i, i, ONE);
            p.set(j, j, ONE);
            p
        })
        .collect();
    ProjectiveMeasurement::new(projectors, (0..n / 2).collect())
}

/// `{|+_ij>, |−_ij>, rest}` with labels 0, 1, 2.
fn parity_measurement(n: usize, i: usize, j: usize) -> Result<ProjectiveMeasurement> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut plus = vec![ZERO; n];
    let mut minus = vec![ZERO; n];
    plus[i] = h * ONE;
    plus[j] = h * ONE;
    minus[i] = h * ONE;
    minus[j] = -h * ONE;
    let mut rest = Operator::identity(n);
    rest.set(i, i, ZERO);
    rest.set(j, j, ZERO);
    ProjectiveMeasurement::new(
        vec![Operator::projector(&plus), Operator::projector(&minus), rest],
        vec![0, 1, 2],
    )
}

/// Exact distribution of Bob's answer in the one-way quantum protocol:
/// `(answer, probability)` for every answer of positive probability.
pub fn hm_quantum_distribution(x: &Bits, matching: &MatchingSpec) -> Result<Vec<(HmAnswer, f64)>> {
    let m = matching.check_for(x)?;
    let targets: Vec<usize> = (0..m).collect();
    let state = alice_message(m, x)?;
    let mut out = Vec::new();
    for e in state.measure(&pair_measurement(matching)?, &targets)?.entries {
        let Some(post) = e.state else { continue };
        let (i, j) = matching.pairs[e.label];
        for f in post.measure(&parity_measurement(matching.n, i, j)?, &targets)?.entries {
            if f.probability > 1e-12 {
                // Label 2 (outside the pair) has zero probability on the projected state.
                let parity = u8::try_from(f.label).map_err(|_| Error::InvalidMeasurement("label".into()))?;
                out.push((HmAnswer { i: i + 1, j: j + 1, parity }, e.probability * f.probability));
            }
        }
    }
    Ok(out)
}

/// Alice sends `(1/√n) Σ (−1)^{x_i}|i>`; Bob measures with the projectors
/// `|i><i| + |j><j|` of his matching, then distinguishes
/// `(|i> ± |j>)/√2` to learn `x_i ⊕ x_j`.
pub fn hm_quantum(x: &Bits, matching: &MatchingSpec, rng: &mut SeededRng) -> Result<ProtocolResult<HmAnswer>> {
    let dist = hm_quantum_distribution(x, matching)?;
    let m = log2_exact(matching.n, "n")?;
    let mut ch = Channel::new();
    ch.send_qubits(Party::Alice, "(1/sqrt n) sum (-1)^{x_i} |i>", m as u64);
    let weights: Vec<f64> = dist.iter().map(|(_, p)| *p).collect();
    let answer = dist[rng.weighted_index(&weights)].0;
    let exact: f64 = dist.iter().filter(|(a, _)| a.is_correct(x, matching)).map(|(_, p)| p).sum();
    let correct = answer.is_correct(x, matching);
    Ok(ch.finish(answer, Some(correct), Some(exact)))
}

/// One point `(k, (i, j), ℓ)` of the non-local joint distribution; `i, j`
/// are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct HmJoint {
    pub k: usize,
    pub i: usize,
    pub j: usize,
    pub l: usize,
    pub probability: f64,
}

impl HmJoint {
    /// `i·(k⊕ℓ) + j·(k⊕ℓ) = x_i + x_j (mod 2)`, with `i, j` read as 0-based
    /// `m`-bit strings.
    pub fn satisfies(&self, x: &Bits) -> bool {
        let (i, j) = (self.i - 1, self.j - 1);
        let d = self.k ^ self.l;
        let lhs = ((i & d).count_ones() + (j & d).count_ones()) % 2;
        let rhs = (u32::from(x.get(i)) + u32::from(x.get(j))) % 2;
        lhs == rhs
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct HmNonlocalRun {
    /// Every `(k, pair, ℓ)`, including zero-probability points.
    pub distribution: Vec<HmJoint>,
    pub sample: HmJoint,
    pub ledger: CostLedger,
}

/// Shared `(1/√n) Σ |i>|i>`. Alice adds `(−1)^{x_i}`, Bob measures his
/// matching's pair projectors, both Hadamard their registers and measure.
pub fn hm_nonlocal(x: &Bits, matching: &MatchingSpec, rng: &mut SeededRng) -> Result<HmNonlocalRun> {
    let m = matching.check_for(x)?;
    let n = matching.n;
    let mut ch = Channel::new();
    ch.share_ebits(m as u64);
    let mut amp = vec![0.0; n * n];
    for i in 0..n {
        amp[i * n + i] = (n as f64).sqrt().recip();
    }
    let shared = StateVector::from_real(&amp)?.apply_sign(|idx| x.get(idx / n));
    let bob: Vec<usize> = (m..2 * m).collect();
    let all: Vec<usize> = (0..2 * m).collect();
    let mut distribution = Vec::with_capacity(n * n * n / 2);
    for e in shared.measure(&pair_measurement(matching)?, &bob)?.entries {
        let (i, j) = matching.pairs[e.label];
        let post = match e.state {
            Some(s) => Some(s.apply_each(&Operator::hadamard(), &all)?),
            None => None,
        };
        for k in 0..n {
            for l in 0..n {
                let p = post.as_ref().map_or(0.0, |s| e.probability * s.probability(k * n + l));
                distribution.push(HmJoint {
                    k,
                    i: i + 1,
                    j: j + 1,
                    l,
                    probability: p,
                });
            }
        }
    }
    let weights: Vec<f64> = distribution.iter().map(|d| d.probability).collect();
    let sample = distribution[rng.weighted_index(&weights)];
    Ok(HmNonlocalRun {
        distribution,
        sample,
        ledger: ch.ledger().clone(),
    })
}

fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for t in 0..k {
        r = r.checked_mul((n - t) as u128)? / (t as u128 + 1);
    }
    Some(r)
}

/// Probability that a uniform `k`-subset of `n` points contains both ends of
/// at least one of the `n/2` matched pairs, by inclusion–exclusion.
pub fn hm_classical_success_exact(n: usize, k: usize) -> Result<f64> {
    let too_big = || Error::param("n", "binomial coefficients overflow 128 bits");
    let total = binomial(n, k).ok_or_else(too_big)?;
    let mut miss: i128 = 0;
    for j in 0..=(n / 2).min(k / 2) {
        let term = binomial(n / 2, j).ok_or_else(too_big)? * binomial(n - 2 * j, k - 2 * j).ok_or_else(too_big)?;
        let term = i128::try_from(term).map_err(|_| too_big())?;
        miss += if j % 2 == 0 { term } else { -term };
    }
    Ok(1.0 - miss as f64 / total as f64)
}

/// Alice sends `(i, x_i)` for `sample_size` distinct random positions; Bob
/// answers for the first pair of his matching with both ends sampled and
/// declares failure (`None`) if there is none.
pub fn hm_classical_oneway(
    x: &Bits,
    matching: &MatchingSpec,
    sample_size: usize,
    rng: &mut SeededRng,
) -> Result<ProtocolResult<Option<HmAnswer>>> {
    let n = matching.n;
    if x.len() != n {
        return Err(Error::LengthMismatch(x.len(), n));
    }
    if sample_size > n {
        return Err(Error::param("sample_size", format!("{sample_size} exceeds n = {n}")));
    }
    let width = ceil_log2(n as u64) as u64 + 1;
    let mut ch = Channel::new();
    let mut known = vec![None; n];
    for i in rng.sample_distinct(n, sample_size) {
        ch.send_bits(Party::Alice, format!("({}, {})", i + 1, u8::from(x.get(i))), width);
        known[i] = Some(x.get(i));
    }
    let answer = matching.pairs.iter().find_map(|&(i, j)| match (known[i], known[j]) {
        (Some(a), Some(b)) => Some(HmAnswer {
            i: i + 1,
            j: j + 1,
            parity: u8::from(a ^ b),
        }),
        _ => None,
    });
    let correct = answer.is_some_and(|a| a.is_correct(x, matching));
    let exact = hm_classical_success_exact(n, sample_size)?;
    Ok(ch.finish(answer, Some(correct), Some(exact)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_validation() {
        assert!(MatchingSpec::from_one_based(4, &[(1, 2), (2, 3)]).is_err());
        assert!(MatchingSpec::from_one_based(4, &[(1, 2)]).is_err());
        assert!(MatchingSpec::from_one_based(3, &[(1, 2)]).is_err());
        assert!(MatchingSpec::from_one_based(4, &[(1, 5), (2, 3)]).is_err());
        let m = MatchingSpec::random(16, &mut SeededRng::new(2)).unwrap();
        assert_eq!(m.pairs().len(), 8);
    }

    #[test]
    fn two_point_example() {
        let m = MatchingSpec::from_one_based(2, &[(1, 2)]).unwrap();
        let d = hm_quantum_distribution(&"10".parse().unwrap(), &m).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].0, HmAnswer { i: 1, j: 2, parity: 1 });
        assert!((d[0].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_string_has_even_parity() {
        let m = MatchingSpec::halves(8).unwrap();
        let r = hm_quantum(&Bits::zeros(8), &m, &mut SeededRng::new(4)).unwrap();
        assert_eq!(r.output.parity, 0);
        assert_eq!(r.ledger.qubits, 3);
    }

    #[test]
    fn classical_edge_cases() {
        let x: Bits = "0110100110010110".parse().unwrap();
        let m = MatchingSpec::adjacent(16).unwrap();
        let mut rng = SeededRng::new(8);
        let all = hm_classical_oneway(&x, &m, 16, &mut rng).unwrap();
        assert!(all.correct.unwrap());
        assert_eq!(all.exact_success, Some(1.0));
        assert_eq!(all.ledger.classical_bits, 16 * 5);
        let one = hm_classical_oneway(&x, &m, 1, &mut rng).unwrap();
        assert_eq!(one.output, None);
        assert_eq!(one.exact_success, Some(0.0));
    }

    #[test]
    fn nonlocal_zero_string() {
        let m = MatchingSpec::adjacent(4).unwrap();
        let r = hm_nonlocal(&Bits::zeros(4), &m, &mut SeededRng::new(1)).unwrap();
        let total: f64 = r.distribution.iter().map(|d| d.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for d in &r.distribution {
            if d.probability > 1e-12 {
                let (i, j) = (d.i - 1, d.j - 1);
                assert_eq!(((i ^ j) & (d.k ^ d.l)).count_ones() % 2, 0);
            }
        }
        assert_eq!(r.ledger.ebits, 2);
    }
}
