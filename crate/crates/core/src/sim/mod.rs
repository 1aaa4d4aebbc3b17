//! Desk-scale simulation of the block-Markov superposition and binning code.
//!
//! Block 0 carries the constant messages `(0, 0, 0)`. Blocks `1..b` carry
//! fresh `(t, j, l)` triples, and a final flush block `b` with constant
//! messages lets the receiver decode block `b-1`. In block `i` the relay
//! sends `s(w_i)` with `w_i = φ(t_{i-1})` computed from the transmitted
//! `t_{i-1}`; its own decoding errors are counted but not propagated.

mod codebook;
mod equivocation;
mod typical;

pub use codebook::{generate_codebook, Codebook, SetSizes};
pub use equivocation::{equivocation_exact, plugin_lower_bound, DEFAULT_ENUMERATION_CAP};
pub use typical::{typical_set_test, TypicalityChecker};

use rand::distr::weighted::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::RelayChannelDMC;
use crate::error::{Error, Result};
use crate::info::{build_joint, AuxInput};
use crate::var::Var::{S, U, X, Y, Z};

/// Default cap on stored codebook symbols.
pub const DEFAULT_MEMORY_CAP: u128 = 20_000_000;

/// Slack added before flooring `n·r` so that exact products are not lost to round-off.
const FLOOR_SLACK: f64 = 1e-9;

/// Rates in bits per symbol for `|T|, |L|, |J|, |W|`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Rates {
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    #[default]
    MonteCarlo,
    ExactEquivocation,
}

fn default_trials() -> usize {
    100
}

fn default_memory_cap() -> u128 {
    DEFAULT_MEMORY_CAP
}

fn default_enumeration_cap() -> u128 {
    DEFAULT_ENUMERATION_CAP
}

/// Simulation configuration, also the JSON input format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: usize,
    pub b: usize,
    pub rates: Rates,
    pub epsilon: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub mode: SimMode,
    #[serde(default = "default_memory_cap")]
    pub memory_cap: u128,
    #[serde(default = "default_enumeration_cap")]
    pub enumeration_cap: u128,
    pub aux: AuxInput,
    pub channel: RelayChannelDMC,
}

impl SimConfig {
    pub fn new(n: usize, b: usize, rates: Rates, epsilon: f64, seed: u64, aux: AuxInput, channel: RelayChannelDMC) -> Result<Self> {
        let cfg = SimConfig {
            n,
            b,
            rates,
            epsilon,
            seed,
            trials: default_trials(),
            mode: SimMode::MonteCarlo,
            memory_cap: DEFAULT_MEMORY_CAP,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            aux,
            channel,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("n must be at least 1".into()));
        }
        if self.b < 2 {
            return Err(Error::InvalidConfig("b must be at least 2".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.aux.ns() != self.channel.ns() || self.aux.nx() != self.channel.nx() {
            return Err(Error::DimensionMismatch("auxiliary input does not match the channel alphabets".into()));
        }
        let Rates { r0, r1, r2, r } = self.rates;
        if [r0, r1, r2, r].iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidConfig("rates must be finite and nonnegative".into()));
        }
        Ok(())
    }

    /// `2^⌊n·r⌋` for each rate.
    pub fn set_sizes(&self) -> Result<SetSizes> {
        self.validate()?;
        let size = |rate: f64| -> Result<usize> {
            let bits = (self.n as f64 * rate + FLOOR_SLACK).floor();
            if bits >= 40.0 {
                return Err(Error::MemoryCapExceeded {
                    needed: u128::MAX,
                    cap: self.memory_cap,
                });
            }
            Ok(1usize << bits as u32)
        };
        Ok(SetSizes {
            t: size(self.rates.r0)?,
            l: size(self.rates.r1)?,
            j: size(self.rates.r2)?,
            w: size(self.rates.r)?,
        })
    }
}

/// RNG stream `stream` of `seed`. Stream 0 draws the codebook, stream
/// `k + 1` drives Monte-Carlo trial `k`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Fresh messages of one block; `w` follows from the previous `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub t: usize,
    pub j: usize,
    pub l: usize,
}

/// Error counts of one run of `b` blocks. Counts are per message block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BlockCounts {
    pub blocks: usize,
    pub receiver: usize,
    pub relay: usize,
    pub e1a: usize,
    pub e1b: usize,
    pub e1c: usize,
    pub e2a: usize,
    pub e2b: usize,
    /// Blocks where an overall error had no decoder error to account for it.
    pub union_violations: usize,
}

impl BlockCounts {
    fn add(&mut self, o: &BlockCounts) {
        self.blocks += o.blocks;
        self.receiver += o.receiver;
        self.relay += o.relay;
        self.e1a += o.e1a;
        self.e1b += o.e1b;
        self.e1c += o.e1c;
        self.e2a += o.e2a;
        self.e2b += o.e2b;
        self.union_violations += o.union_violations;
    }
}

/// Precomputed typicality checkers and channel samplers of one configuration.
pub struct Decoders {
    sy: TypicalityChecker,
    suy: TypicalityChecker,
    suxy: TypicalityChecker,
    suz: TypicalityChecker,
    suxz: TypicalityChecker,
    rows: Vec<WeightedIndex<f64>>,
    ns: usize,
    nz: usize,
}

impl Decoders {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        let joint = build_joint(&cfg.aux, &cfg.channel)?;
        let eps = cfg.epsilon;
        let ch = &cfg.channel;
        let rows = (0..ch.nx() * ch.ns())
            .map(|i| {
                WeightedIndex::new(ch.row(i / ch.ns(), i % ch.ns()))
                    .map_err(|e| Error::InternalConsistency(format!("channel row {i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Decoders {
            sy: TypicalityChecker::new(&joint, &[S, Y], eps)?,
            suy: TypicalityChecker::new(&joint, &[S, U, Y], eps)?,
            suxy: TypicalityChecker::new(&joint, &[S, U, X, Y], eps)?,
            suz: TypicalityChecker::new(&joint, &[S, U, Z], eps)?,
            suxz: TypicalityChecker::new(&joint, &[S, U, X, Z], eps)?,
            rows,
            ns: ch.ns(),
            nz: ch.nz(),
        })
    }

    fn transmit(&self, x: &[usize], s: &[usize], rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<usize>) {
        let mut y = Vec::with_capacity(x.len());
        let mut z = Vec::with_capacity(x.len());
        for (&xk, &sk) in x.iter().zip(s) {
            let cell = self.rows[xk * self.ns + sk].sample(rng);
            y.push(cell / self.nz);
            z.push(cell % self.nz);
        }
        (y, z)
    }
}

/// The unique candidate passing `test`, if exactly one does.
fn unique(cands: impl Iterator<Item = usize>, mut test: impl FnMut(usize) -> bool) -> Option<usize> {
    let mut found = None;
    for c in cands {
        if test(c) {
            if found.is_some() {
                return None;
            }
            found = Some(c);
        }
    }
    found
}

/// Runs `messages.len() + 2` blocks (constant first block, the messages,
/// flush block) and counts decoding errors per message block.
pub fn run_blocks(book: &Codebook, dec: &Decoders, messages: &[Message], rng: &mut ChaCha8Rng) -> Result<BlockCounts> {
    let sz = book.sizes;
    if let Some(m) = messages.iter().find(|m| m.t >= sz.t || m.j >= sz.j || m.l >= sz.l) {
        return Err(Error::InvalidConfig(format!("message {m:?} outside the message sets {sz:?}")));
    }
    let nb = messages.len() + 1;
    let msg = |i: usize| if i == 0 || i == nb { Message { t: 0, j: 0, l: 0 } } else { messages[i - 1] };

    let mut counts = BlockCounts::default();
    // Receiver state for the block awaiting decoding.
    let mut prev_y: Vec<usize> = Vec::new();
    let mut prev_w_hat: Option<usize> = None;
    let mut relay_ok = vec![true; nb];

    for i in 1..=nb {
        let cur = msg(i);
        let w = book.phi(msg(i - 1).t);
        let s = book.s(w);
        let (y, z) = dec.transmit(book.x(w, cur.t, cur.j, cur.l), s, rng);

        if i < nb {
            let t_hat = unique(0..sz.t, |t| dec.suz.check(&[s, book.u(w, t), &z]));
            let e2a = t_hat != Some(cur.t);
            let j_hat = t_hat.and_then(|th| {
                unique(0..sz.j, |j| (0..sz.l).any(|l| dec.suxz.check(&[s, book.u(w, th), book.x(w, th, j, l), &z])))
            });
            let e2b = e2a || j_hat != Some(cur.j);
            counts.e2a += e2a as usize;
            counts.e2b += e2b as usize;
            relay_ok[i] = !e2a && !e2b;
        }

        let w_hat = unique(0..sz.w, |c| dec.sy.check(&[book.s(c), &y]));

        if i >= 2 {
            let m = i - 1;
            let truth = msg(m);
            let e1a = w_hat != Some(w);
            let t_hat = match (prev_w_hat, w_hat) {
                (Some(pw), Some(cw)) => unique(book.bin(cw).iter().copied(), |t| dec.suy.check(&[book.s(pw), book.u(pw, t), &prev_y])),
                _ => None,
            };
            let jl_hat = match (prev_w_hat, t_hat) {
                (Some(pw), Some(th)) => unique(0..sz.j * sz.l, |jl| {
                    dec.suxy.check(&[book.s(pw), book.u(pw, th), book.x(pw, th, jl / sz.l, jl % sz.l), &prev_y])
                }),
                _ => None,
            };
            let e1b = t_hat != Some(truth.t);
            let e1c = e1b || jl_hat != Some(truth.j * sz.l + truth.l);
            let receiver_err = t_hat != Some(truth.t) || jl_hat != Some(truth.j * sz.l + truth.l);
            counts.blocks += 1;
            counts.e1a += e1a as usize;
            counts.e1b += e1b as usize;
            counts.e1c += e1c as usize;
            counts.receiver += receiver_err as usize;
            counts.relay += !relay_ok[m] as usize;
            if receiver_err && !(e1a || e1b || e1c) {
                counts.union_violations += 1;
            }
        }
        prev_y = y;
        prev_w_hat = w_hat;
    }
    Ok(counts)
}

/// Per-decoder error rates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DecoderErrors {
    pub e1a: f64,
    pub e1b: f64,
    pub e1c: f64,
    pub e2a: f64,
    pub e2b: f64,
}

/// Outcome of [`simulate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub mode: SimMode,
    pub n: usize,
    pub b: usize,
    pub seed: u64,
    pub sizes: SetSizes,
    pub trials: usize,
    /// Decoded message blocks over all trials.
    pub blocks: usize,
    pub err_receiver: f64,
    pub err_relay: f64,
    pub decoders: DecoderErrors,
    pub counts: BlockCounts,
    pub union_bound_violations: usize,
    /// `(1/n) H(L|Z^n)` of a single block.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equivocation_rate: Option<f64>,
    /// Lower bound on the equivocation rate evaluated at the measured relay errors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plugin_lower_bound: Option<f64>,
}

impl SimReport {
    pub const CSV_HEADER: &'static str =
        "mode,n,b,seed,trials,blocks,t,l,j,w,err_receiver,err_relay,e1a,e1b,e1c,e2a,e2b,union_bound_violations,equivocation_rate,plugin_lower_bound";

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        let mode = match self.mode {
            SimMode::MonteCarlo => "monte_carlo",
            SimMode::ExactEquivocation => "exact_equivocation",
        };
        let d = &self.decoders;
        format!(
            "{mode},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.b,
            self.seed,
            self.trials,
            self.blocks,
            self.sizes.t,
            self.sizes.l,
            self.sizes.j,
            self.sizes.w,
            self.err_receiver,
            self.err_relay,
            d.e1a,
            d.e1b,
            d.e1c,
            d.e2a,
            d.e2b,
            self.union_bound_violations,
            opt(self.equivocation_rate),
            opt(self.plugin_lower_bound),
        )
    }
}

fn rate(k: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        k as f64 / total as f64
    }
}

/// Monte-Carlo estimate of the error probabilities of the random code of
/// `cfg`, plus the exact single-block equivocation in exact mode.
///
/// Trial `k` draws uniform messages and channel noise from stream `k + 1`.
pub fn simulate(cfg: &SimConfig) -> Result<SimReport> {
    cfg.validate()?;
    let book = generate_codebook(cfg)?;
    let equivocation_rate = match cfg.mode {
        SimMode::ExactEquivocation => Some(equivocation_exact(cfg, &book)?),
        SimMode::MonteCarlo => None,
    };
    let dec = Decoders::new(cfg)?;
    let sz = book.sizes;
    let mut counts = BlockCounts::default();
    for k in 0..cfg.trials {
        let mut rng = stream_rng(cfg.seed, k as u64 + 1);
        let messages: Vec<Message> = (1..cfg.b)
            .map(|_| Message {
                t: rng.random_range(0..sz.t),
                j: rng.random_range(0..sz.j),
                l: rng.random_range(0..sz.l),
            })
            .collect();
        counts.add(&run_blocks(&book, &dec, &messages, &mut rng)?);
    }
    let decoders = DecoderErrors {
        e1a: rate(counts.e1a, counts.blocks),
        e1b: rate(counts.e1b, counts.blocks),
        e1c: rate(counts.e1c, counts.blocks),
        e2a: rate(counts.e2a, counts.blocks),
        e2b: rate(counts.e2b, counts.blocks),
    };
    let plugin = match cfg.mode {
        SimMode::ExactEquivocation => Some(plugin_lower_bound(cfg, &sz, decoders.e2a, decoders.e2b)?),
        SimMode::MonteCarlo => None,
    };
    Ok(SimReport {
        mode: cfg.mode,
        n: cfg.n,
        b: cfg.b,
        seed: cfg.seed,
        sizes: sz,
        trials: cfg.trials,
        blocks: counts.blocks,
        err_receiver: rate(counts.receiver, counts.blocks),
        err_relay: rate(counts.relay, counts.blocks),
        decoders,
        counts,
        union_bound_violations: counts.union_violations,
        equivocation_rate,
        plugin_lower_bound: plugin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Y = X, Z constant, S ignored.
    fn noiseless_blind() -> RelayChannelDMC {
        RelayChannelDMC::from_fn(2, 1, 2, 1, |x, _, y, _| if y == x { 1.0 } else { 0.0 }).unwrap()
    }

    fn bsc_pair(py: f64, pz: f64) -> RelayChannelDMC {
        RelayChannelDMC::from_fn(2, 1, 2, 2, |x, _, y, z| {
            let a = if y == x { 1.0 - py } else { py };
            let b = if z == x { 1.0 - pz } else { pz };
            a * b
        })
        .unwrap()
    }

    fn uniform_x() -> AuxInput {
        AuxInput::constant(1, &[0.5, 0.5]).unwrap()
    }

    #[test]
    fn single_message_noiseless_is_error_free() {
        let mut cfg = SimConfig::new(8, 4, Rates::default(), 0.05, 1, uniform_x(), noiseless_blind()).unwrap();
        cfg.trials = 20;
        let r = simulate(&cfg).unwrap();
        assert_eq!(r.blocks, 20 * 3);
        assert_eq!(r.err_receiver, 0.0);
        assert_eq!(r.err_relay, 0.0);
        assert_eq!(r.decoders, DecoderErrors::default());
        assert_eq!(r.union_bound_violations, 0);
    }

    #[test]
    fn above_capacity_fails_decoder_1c() {
        // I(X;Y) of BSC(0.2) is 0.278 bits; ask for 1 bit per symbol.
        let rates = Rates { r0: 0.0, r1: 0.5, r2: 0.5, r: 0.0 };
        let mut cfg = SimConfig::new(8, 2, rates, 0.3, 11, uniform_x(), bsc_pair(0.2, 0.2)).unwrap();
        cfg.trials = 200;
        let r = simulate(&cfg).unwrap();
        assert!(r.decoders.e1c > 0.5, "{}", r.decoders.e1c);
        assert_eq!(r.union_bound_violations, 0);
    }

    #[test]
    fn seed_determinism() {
        let rates = Rates { r0: 0.25, r1: 0.25, r2: 0.125, r: 0.125 };
        let mut cfg = SimConfig::new(8, 3, rates, 0.3, 4, uniform_x(), bsc_pair(0.05, 0.2)).unwrap();
        cfg.trials = 10;
        let a = serde_json::to_string(&simulate(&cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&simulate(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
        cfg.seed = 5;
        let c = serde_json::to_string(&simulate(&cfg).unwrap()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rates_and_config_checks() {
        let cfg = SimConfig::new(6, 2, Rates { r0: 0.5, r1: 1.0 / 3.0, r2: 1.0 / 6.0, r: 0.0 }, 0.1, 0, uniform_x(), noiseless_blind()).unwrap();
        assert_eq!(cfg.set_sizes().unwrap(), SetSizes { t: 8, l: 4, j: 2, w: 1 });
        assert!(SimConfig::new(6, 1, Rates::default(), 0.1, 0, uniform_x(), noiseless_blind()).is_err());
        assert!(SimConfig::new(0, 2, Rates::default(), 0.1, 0, uniform_x(), noiseless_blind()).is_err());
        assert!(SimConfig::new(6, 2, Rates::default(), 0.0, 0, uniform_x(), noiseless_blind()).is_err());
        let book = generate_codebook(&cfg).unwrap();
        let dec = Decoders::new(&cfg).unwrap();
        let bad = [Message { t: 8, j: 0, l: 0 }];
        assert!(run_blocks(&book, &dec, &bad, &mut stream_rng(0, 1)).is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = SimConfig::new(6, 2, Rates { r0: 0.0, r1: 1.0 / 3.0, r2: 0.0, r: 0.0 }, 0.1, 3, uniform_x(), noiseless_blind()).unwrap();
        let s = serde_json::to_string(&cfg).unwrap();
        let back: SimConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back, cfg);
    }
}
