//! Two-party protocol harness with cost accounting, and the
//! communication-complexity protocols built on it.

mod dj;
mod equality;
mod grover;
mod hm;
mod ip;
mod raz;

pub use dj::{dj_nonlocal, dj_promise_holds, dj_quantum, NonlocalDjRun};
pub use equality::{eq_deterministic, eq_private_coin_poly, eq_public_coin};
pub use grover::{grover_schedule, intersection_grover};
pub use hm::{
    hm_classical_oneway, hm_classical_success_exact, hm_nonlocal, hm_quantum, hm_quantum_distribution, HmAnswer,
    HmJoint, HmNonlocalRun, MatchingSpec,
};
pub use ip::{ip_transfer_demo, IpTransfer};
pub use raz::{raz_instance_gen, raz_quantum, RazInstance};

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
    Referee,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MessageKind {
    Bit,
    Qubit,
}

/// Resources consumed by one protocol run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CostLedger {
    pub classical_bits: u64,
    pub qubits: u64,
    pub ebits: u64,
    pub public_coin_bits: u64,
    pub nl_boxes: u64,
    pub rounds: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Message {
    pub sender: Party,
    pub payload: String,
    pub size: u64,
    pub kind: MessageKind,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub messages: Vec<Message>,
}

impl Transcript {
    /// `(classical bits, qubits)` carried by the messages.
    pub fn totals(&self) -> (u64, u64) {
        self.messages.iter().fold((0, 0), |(b, q), m| match m.kind {
            MessageKind::Bit => (b + m.size, q),
            MessageKind::Qubit => (b, q + m.size),
        })
    }
}

/// Records messages and resources as a protocol runs. A new round starts
/// whenever the sender changes.
#[derive(Clone, Debug, Default)]
pub struct Channel {
    ledger: CostLedger,
    transcript: Transcript,
    last_sender: Option<Party>,
}

impl Channel {
    pub fn new() -> Self {
        Channel::default()
    }

    fn send(&mut self, sender: Party, payload: String, size: u64, kind: MessageKind) {
        match kind {
            MessageKind::Bit => self.ledger.classical_bits += size,
            MessageKind::Qubit => self.ledger.qubits += size,
        }
        if self.last_sender != Some(sender) {
            self.ledger.rounds += 1;
            self.last_sender = Some(sender);
        }
        self.transcript.messages.push(Message {
            sender,
            payload,
            size,
            kind,
        });
    }

    pub fn send_bits(&mut self, sender: Party, payload: impl Into<String>, size: u64) {
        self.send(sender, payload.into(), size, MessageKind::Bit);
    }

    pub fn send_qubits(&mut self, sender: Party, payload: impl Into<String>, size: u64) {
        self.send(sender, payload.into(), size, MessageKind::Qubit);
    }

    pub fn share_ebits(&mut self, n: u64) {
        self.ledger.ebits += n;
    }

    pub fn toss_public_coins(&mut self, n: u64) {
        self.ledger.public_coin_bits += n;
    }

    pub fn use_boxes(&mut self, n: u64) {
        self.ledger.nl_boxes += n;
    }

    pub fn ledger(&self) -> &CostLedger {
        &self.ledger
    }

    pub fn finish<O>(self, output: O, correct: Option<bool>, exact_success: Option<f64>) -> ProtocolResult<O> {
        ProtocolResult {
            output,
            ledger: self.ledger,
            transcript: self.transcript,
            correct,
            exact_success,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolResult<O> {
    pub output: O,
    pub ledger: CostLedger,
    pub transcript: Transcript,
    /// Whether `output` is right, when a reference answer exists.
    pub correct: Option<bool>,
    /// Exact probability, over the protocol's randomness, that the output is
    /// right on this input.
    pub exact_success: Option<f64>,
}

/// `log2 n` for a power of two `n >= 2`.
pub(crate) fn log2_exact(n: usize, name: &'static str) -> Result<usize> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::param(name, format!("{n} is not a power of two >= 2")));
    }
    Ok(n.trailing_zeros() as usize)
}
