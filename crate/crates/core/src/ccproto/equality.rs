use super::{Channel, Party, ProtocolResult};
use crate::bits::Bits;
use crate::error::Result;
use crate::field::{agreement_count, ceil_log2, modulus_for, poly_eval};
use crate::rng::SeededRng;

/// Bob sends his whole string; Alice announces the answer.
pub fn eq_deterministic(x: &Bits, y: &Bits) -> Result<ProtocolResult<bool>> {
    x.check_len(y)?;
    let mut ch = Channel::new();
    ch.send_bits(Party::Bob, format!("y = {y}"), y.len() as u64);
    let out = x == y;
    ch.send_bits(Party::Alice, format!("answer {}", u8::from(out)), 1);
    Ok(ch.finish(out, Some(true), Some(1.0)))
}

/// `k` rounds of "Alice sends `x·r` for a shared random `r`". Accepts iff
/// every round matches; false-accept probability `2^-k`.
pub fn eq_public_coin(x: &Bits, y: &Bits, k: usize, rng: &mut SeededRng) -> Result<ProtocolResult<bool>> {
    x.check_len(y)?;
    let n = x.len();
    let mut ch = Channel::new();
    let mut accept = true;
    for round in 0..k {
        let r = Bits::random(n, rng);
        ch.toss_public_coins(n as u64);
        let a = x.dot(&r)?;
        ch.send_bits(Party::Alice, format!("round {round}: x.r = {}", u8::from(a)), 1);
        if a != y.dot(&r)? {
            accept = false;
        }
    }
    let equal = x == y;
    let exact = if equal { 1.0 } else { 1.0 - 0.5f64.powi(k as i32) };
    Ok(ch.finish(accept, Some(accept == equal), Some(exact)))
}

/// Alice sends `(a, p_x(a))` for a uniform field point `a`; Bob accepts iff
/// `p_x(a) = p_y(a)`. The field is `F_p` with `p` the smallest prime `>= 3n`.
pub fn eq_private_coin_poly(x: &Bits, y: &Bits, rng: &mut SeededRng) -> Result<ProtocolResult<bool>> {
    x.check_len(y)?;
    if x.is_empty() {
        return Err(crate::Error::param("n", "strings must be non-empty"));
    }
    let p = modulus_for(x.len());
    let width = ceil_log2(p) as u64;
    let a = rng.below(p as usize) as u64;
    let px = poly_eval(x, a, p);
    let mut ch = Channel::new();
    ch.send_bits(Party::Alice, format!("(a, p_x(a)) = ({a}, {px})"), 2 * width);
    let out = px == poly_eval(y, a, p);
    let equal = x == y;
    let exact = if equal {
        1.0
    } else {
        1.0 - agreement_count(x, y, p) as f64 / p as f64
    };
    Ok(ch.finish(out, Some(out == equal), Some(exact)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> Bits {
        s.parse().unwrap()
    }

    #[test]
    fn deterministic_costs() {
        let r = eq_deterministic(&b("0101"), &b("0101")).unwrap();
        assert!(r.output);
        assert_eq!(r.ledger.classical_bits, 5);
        let r = eq_deterministic(&b("0000"), &b("0001")).unwrap();
        assert!(!r.output);
        assert_eq!(r.ledger.classical_bits, 5);
        assert!(eq_deterministic(&b("0"), &b("01")).is_err());
    }

    #[test]
    fn public_coin_one_sided() {
        let mut rng = SeededRng::new(5);
        let x = b("1100101");
        for _ in 0..200 {
            assert!(eq_public_coin(&x, &x, 3, &mut rng).unwrap().output);
        }
        let r = eq_public_coin(&x, &b("0000000"), 0, &mut rng).unwrap();
        assert!(r.output);
        let r = eq_public_coin(&x, &b("0000000"), 4, &mut rng).unwrap();
        assert_eq!(r.ledger.classical_bits, 4);
        assert_eq!(r.ledger.public_coin_bits, 28);
    }

    #[test]
    fn private_coin_costs_and_examples() {
        let mut rng = SeededRng::new(9);
        let x = b("1011");
        let r = eq_private_coin_poly(&x, &x, &mut rng).unwrap();
        assert!(r.output);
        assert_eq!(r.ledger.classical_bits, 8);
        // p_x − p_y is the constant 1: never a false accept.
        let r = eq_private_coin_poly(&b("0000"), &b("1000"), &mut rng).unwrap();
        assert_eq!(r.exact_success, Some(1.0));
        assert!(!r.output);
    }
}
