//! Per-machine communication accounting.

use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

/// Identifier of a machine in a clique of `n` machines, `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MachineId(pub u32);

impl MachineId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for MachineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m{}", self.0)
    }
}

/// Words sent and received by each machine in one routing phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseLoad {
    pub sent: Vec<u64>,
    pub received: Vec<u64>,
}

impl PhaseLoad {
    pub fn new(n: usize) -> Self {
        PhaseLoad {
            sent: vec![0; n],
            received: vec![0; n],
        }
    }

    pub fn machines(&self) -> usize {
        self.sent.len()
    }

    /// Adds a transfer of `words` from `src` to `dst`. Self-delivery is free.
    #[inline]
    pub fn add(&mut self, src: usize, dst: usize, words: u64) {
        if src != dst && words > 0 {
            self.sent[src] += words;
            self.received[dst] += words;
        }
    }

    /// The larger of send and receive load, maximized over machines.
    pub fn max_load(&self) -> u64 {
        self.sent
            .iter()
            .zip(&self.received)
            .map(|(s, r)| (*s).max(*r))
            .max()
            .unwrap_or(0)
    }

    pub fn total_sent(&self) -> u64 {
        self.sent.iter().sum()
    }

    pub fn total_received(&self) -> u64 {
        self.received.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.sent.iter().all(|&w| w == 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseRecord {
    pub label: String,
    /// First round the phase occupies.
    pub start_round: u64,
    pub rounds: u64,
    pub load: PhaseLoad,
}

/// Compact summary of a ledger, suitable for result records.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LedgerSummary {
    pub machines: usize,
    pub phases: u64,
    pub rounds_total: u64,
    pub max_machine_words: u64,
    pub max_phase_load: u64,
    pub total_words: u64,
}

/// Communication ledger of a simulated CongestedClique run.
///
/// Totals per machine are always kept. Per-phase records are kept only when
/// history is enabled, since long estimation runs record millions of phases.
#[derive(Debug, Clone)]
pub struct MessageLedger {
    n: usize,
    history: Option<Vec<PhaseRecord>>,
    rounds_total: u64,
    phases: u64,
    max_phase_load: u64,
    sent_total: Vec<u64>,
    received_total: Vec<u64>,
}

impl MessageLedger {
    /// Ledger that keeps totals only.
    pub fn new(n: usize) -> Self {
        MessageLedger {
            n,
            history: None,
            rounds_total: 0,
            phases: 0,
            max_phase_load: 0,
            sent_total: vec![0; n],
            received_total: vec![0; n],
        }
    }

    /// Ledger that also keeps every phase record.
    pub fn with_history(n: usize) -> Self {
        MessageLedger {
            history: Some(Vec::new()),
            ..Self::new(n)
        }
    }

    pub fn machines(&self) -> usize {
        self.n
    }

    pub fn rounds_total(&self) -> u64 {
        self.rounds_total
    }

    pub fn phases(&self) -> u64 {
        self.phases
    }

    pub fn max_phase_load(&self) -> u64 {
        self.max_phase_load
    }

    pub fn history(&self) -> Option<&[PhaseRecord]> {
        self.history.as_deref()
    }

    pub fn words_sent(&self, m: MachineId) -> u64 {
        self.sent_total[m.index()]
    }

    pub fn words_received(&self, m: MachineId) -> u64 {
        self.received_total[m.index()]
    }

    /// Machine with the largest total load and that load, `max(sent, received)`.
    pub fn max_machine_words(&self) -> (MachineId, u64) {
        let mut best = (MachineId(0), 0);
        for m in 0..self.n {
            let w = self.sent_total[m].max(self.received_total[m]);
            if w > best.1 {
                best = (MachineId(m as u32), w);
            }
        }
        best
    }

    /// Records a phase that was charged `rounds` rounds.
    pub fn record(&mut self, label: &str, load: &PhaseLoad, rounds: u64) {
        assert_eq!(load.machines(), self.n, "phase load sized for a different clique");
        debug_assert_eq!(load.total_sent(), load.total_received());
        for m in 0..self.n {
            self.sent_total[m] += load.sent[m];
            self.received_total[m] += load.received[m];
        }
        self.max_phase_load = self.max_phase_load.max(load.max_load());
        if let Some(h) = self.history.as_mut() {
            h.push(PhaseRecord {
                label: label.to_string(),
                start_round: self.rounds_total,
                rounds,
                load: load.clone(),
            });
        }
        self.rounds_total += rounds;
        self.phases += 1;
    }

    /// Charges `rounds` rounds of pure local work or broadcast-free waiting.
    pub fn add_rounds(&mut self, rounds: u64) {
        self.rounds_total += rounds;
    }

    /// Appends `other` after everything already recorded here.
    pub fn absorb(&mut self, other: &MessageLedger) {
        assert_eq!(self.n, other.n);
        for m in 0..self.n {
            self.sent_total[m] += other.sent_total[m];
            self.received_total[m] += other.received_total[m];
        }
        if let (Some(mine), Some(theirs)) = (self.history.as_mut(), other.history.as_ref()) {
            mine.extend(theirs.iter().map(|r| PhaseRecord {
                start_round: r.start_round + self.rounds_total,
                ..r.clone()
            }));
        }
        self.max_phase_load = self.max_phase_load.max(other.max_phase_load);
        self.rounds_total += other.rounds_total;
        self.phases += other.phases;
    }

    pub fn summary(&self) -> LedgerSummary {
        LedgerSummary {
            machines: self.n,
            phases: self.phases,
            rounds_total: self.rounds_total,
            max_machine_words: self.max_machine_words().1,
            max_phase_load: self.max_phase_load,
            total_words: self.sent_total.iter().sum(),
        }
    }

    /// CSV rows `machine_id,round,words_sent,words_received`, one per machine
    /// and phase, with `round` the first round of the phase. Without history
    /// one row per machine is written with an empty round column.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "machine_id,round,words_sent,words_received")?;
        match &self.history {
            Some(h) => {
                for rec in h {
                    for m in 0..self.n {
                        writeln!(
                            out,
                            "{},{},{},{}",
                            m, rec.start_round, rec.load.sent[m], rec.load.received[m]
                        )?;
                    }
                }
            }
            None => {
                for m in 0..self.n {
                    writeln!(
                        out,
                        "{},,{},{}",
                        m, self.sent_total[m], self.received_total[m]
                    )?;
                }
            }
        }
        Ok(())
    }
}

/// Outcome of checking a ledger against word and round bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub max_machine_words: u64,
    pub max_machine: MachineId,
    pub rounds_total: u64,
    pub word_bound: u64,
    pub round_bound: u64,
    pub words_ok: bool,
    pub rounds_ok: bool,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.words_ok && self.rounds_ok
    }

    /// The machine that broke the word bound, if any.
    pub fn offender(&self) -> Option<MachineId> {
        (!self.words_ok).then_some(self.max_machine)
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "max words {} at {} (bound {}, {}), rounds {} (bound {}, {})",
            self.max_machine_words,
            self.max_machine,
            self.word_bound,
            if self.words_ok { "ok" } else { "FAIL" },
            self.rounds_total,
            self.round_bound,
            if self.rounds_ok { "ok" } else { "FAIL" },
        )
    }
}

pub fn audit_ledger(ledger: &MessageLedger, word_bound_per_machine: u64, round_bound: u64) -> AuditReport {
    let (max_machine, max_machine_words) = ledger.max_machine_words();
    AuditReport {
        max_machine_words,
        max_machine,
        rounds_total: ledger.rounds_total(),
        word_bound: word_bound_per_machine,
        round_bound,
        words_ok: max_machine_words <= word_bound_per_machine,
        rounds_ok: ledger.rounds_total() <= round_bound,
    }
}
