//! Permutations of computational basis states.
//!
//! A [`PermSpec`] is a bijection on `m`-bit values, given either as a lookup
//! table (small `m`) or as a reversible network of X / CNOT / Toffoli gates.
//! Networks come in two flavours: an explicit gate list, and a seeded network
//! that is regenerated from `(seed, depth)` in fixed-size chunks so that a
//! hundred-thousand-wire permutation never has to be held in memory.
//!
//! Permutations act on the computational plane only; the phase plane of a
//! register is never touched by one.

use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::BitVec;

/// Largest table width accepted.
pub const MAX_TABLE_WIDTH: usize = 20;

/// Seeded networks with at most this many gates are expanded into an explicit
/// list when compiled into an oracle.
pub const MATERIALIZE_LIMIT: usize = 1 << 21;

const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("table length {0} is not a power of two")]
    TableLength(usize),
    #[error("table width {0} exceeds the limit of {MAX_TABLE_WIDTH}")]
    TableTooWide(usize),
    #[error("table is not a bijection: value {0} repeats or is out of range")]
    NotBijective(u32),
    #[error("gate {gate} addresses wire {wire}, but the network has {width} wires")]
    WireOutOfRange { gate: usize, wire: u32, width: usize },
    #[error("gate {0} repeats a wire")]
    WireClash(usize),
    #[error("a {kind} gate needs at least {need} wires, network has {width}")]
    TooNarrow { kind: &'static str, need: usize, width: usize },
}

/// One reversible classical gate; indices are wire offsets within the network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RevGate {
    X(u32),
    Cnot(u32, u32),
    Toffoli(u32, u32, u32),
}

impl RevGate {
    /// Applies the gate to a bit-packed window starting at bit 0 of `words`.
    #[inline]
    fn apply_words(self, words: &mut [u64]) {
        #[inline(always)]
        fn bit(words: &[u64], i: u32) -> u64 {
            (words[(i / 64) as usize] >> (i % 64)) & 1
        }
        let (flip, t) = match self {
            RevGate::X(t) => (1, t),
            RevGate::Cnot(c, t) => (bit(words, c), t),
            RevGate::Toffoli(a, b, t) => (bit(words, a) & bit(words, b), t),
        };
        words[(t / 64) as usize] ^= flip << (t % 64);
    }

    #[inline]
    fn apply_u64(self, x: u64) -> u64 {
        match self {
            RevGate::X(t) => x ^ (1 << t),
            RevGate::Cnot(c, t) => x ^ (((x >> c) & 1) << t),
            RevGate::Toffoli(a, b, t) => x ^ (((x >> a) & (x >> b) & 1) << t),
        }
    }

    fn wires(&self) -> ([u32; 3], usize) {
        match *self {
            RevGate::X(t) => ([t, 0, 0], 1),
            RevGate::Cnot(c, t) => ([c, t, 0], 2),
            RevGate::Toffoli(a, b, t) => ([a, b, t], 3),
        }
    }

    fn random<R: Rng>(width: usize, rng: &mut R) -> Self {
        let kinds = width.min(3);
        let w = width as u32;
        let a = rng.gen_range(0..w);
        match rng.gen_range(0..kinds) {
            0 => RevGate::X(a),
            1 => {
                let b = distinct(rng, w, &[a]);
                RevGate::Cnot(a, b)
            }
            _ => {
                let b = distinct(rng, w, &[a]);
                let t = distinct(rng, w, &[a, b]);
                RevGate::Toffoli(a, b, t)
            }
        }
    }
}

fn distinct<R: Rng>(rng: &mut R, w: u32, taken: &[u32]) -> u32 {
    loop {
        let v = rng.gen_range(0..w);
        if !taken.contains(&v) {
            return v;
        }
    }
}

/// Runs `f` on bits `offset..offset + m` of `plane` as packed words, copying
/// the window out and back unless it is the whole word-aligned plane.
fn with_window(plane: &mut BitVec, offset: usize, m: usize, f: impl FnOnce(&mut [u64])) {
    if offset == 0 && m == plane.len() {
        f(plane.words_mut());
        return;
    }
    let mut window = plane.slice(offset, offset + m);
    f(window.words_mut());
    for (i, word) in window.words().iter().enumerate() {
        let start = i * 64;
        let count = (m - start).min(64);
        plane.set_bits(offset + start, count, *word);
    }
}

/// A bijection on `width`-bit computational values.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum PermSpec {
    /// `table[x] = π(x)` over `0..2^m`.
    Table { table: Vec<u32> },
    /// Explicit reversible network, applied in order (reverse order if `reversed`).
    Gates {
        width: usize,
        ops: Vec<RevGate>,
        #[serde(default, skip_serializing_if = "is_false")]
        reversed: bool,
        /// Flat copy of `ops` built on first application; ignored by equality.
        #[serde(skip)]
        program: Program,
    },
    /// `depth` random gates regenerated from `seed`.
    Circuit {
        width: usize,
        seed: u64,
        depth: usize,
        #[serde(default, skip_serializing_if = "is_false")]
        reversed: bool,
    },
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Gates as `[a, b, t, x]`: flip `t` when `x | (bit a & bit b)`. A CNOT has
/// `a == b`. Applying these needs no branch on the gate kind.
type Op = [u32; 4];

/// Compiled ops tagged with the address and length of the gate list they
/// were built from.
type Compiled = (usize, usize, Arc<[Op]>);

#[derive(Clone, Default)]
pub struct Program {
    cache: Arc<OnceLock<Compiled>>,
}

impl PartialEq for Program {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Program {}

impl Program {
    fn compile(ops: &[RevGate]) -> Arc<[Op]> {
        ops.iter()
            .map(|g| match *g {
                RevGate::X(t) => [t, t, t, 1],
                RevGate::Cnot(c, t) => [c, c, t, 0],
                RevGate::Toffoli(a, b, t) => [a, b, t, 0],
            })
            .collect()
    }

    fn get(&self, ops: &[RevGate]) -> Arc<[Op]> {
        let key = (ops.as_ptr() as usize, ops.len());
        let (ptr, len, compiled) = self.cache.get_or_init(|| (key.0, key.1, Self::compile(ops)));
        if (*ptr, *len) == key {
            compiled.clone()
        } else {
            Self::compile(ops)
        }
    }
}

#[inline(always)]
fn run_op(words: &mut [u64], [a, b, t, x]: Op) {
    let bit = |i: u32| (words[(i / 64) as usize] >> (i % 64)) & 1;
    let flip = (bit(a) & bit(b)) | x as u64;
    words[(t / 64) as usize] ^= flip << (t % 64);
}

impl fmt::Debug for PermSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PermSpec::Table { table } => write!(f, "Table(m={}, {} entries)", self.width(), table.len()),
            PermSpec::Gates { width, ops, reversed, .. } => {
                write!(f, "Gates(width={width}, {} ops, reversed={reversed})", ops.len())
            }
            PermSpec::Circuit { width, seed, depth, reversed } => {
                write!(f, "Circuit(width={width}, seed={seed}, depth={depth}, reversed={reversed})")
            }
        }
    }
}

/// Gate count for a random network on `width` wires: `ceil(factor · width · log2(width + 1))`.
pub fn default_depth(width: usize, factor: f64) -> usize {
    let n = width as f64;
    (factor * n * (n + 1.0).log2()).ceil() as usize
}

impl PermSpec {
    /// Identity on `width` wires (an empty network).
    pub fn identity(width: usize) -> Self {
        PermSpec::Gates {
            width,
            ops: Vec::new(),
            reversed: false,
            program: Program::default(),
        }
    }

    pub fn from_table(table: Vec<u32>) -> Result<Self, PermError> {
        let spec = PermSpec::Table { table };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_gates(width: usize, ops: Vec<RevGate>) -> Result<Self, PermError> {
        let spec = PermSpec::Gates {
            width,
            ops,
            reversed: false,
            program: Program::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Uniformly random table permutation on `m <= 20` bits.
    pub fn random_table<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        assert!(m <= MAX_TABLE_WIDTH);
        let mut table: Vec<u32> = (0..1u32 << m).collect();
        table.shuffle(rng);
        PermSpec::Table { table }
    }

    /// Random seeded network of `depth` gates; the seed is drawn from `rng`.
    pub fn random_circuit<R: Rng + ?Sized>(width: usize, depth: usize, rng: &mut R) -> Self {
        PermSpec::Circuit {
            width,
            seed: rng.gen(),
            depth,
            reversed: false,
        }
    }

    pub fn width(&self) -> usize {
        match self {
            PermSpec::Table { table } => table.len().max(1).trailing_zeros() as usize,
            PermSpec::Gates { width, .. } | PermSpec::Circuit { width, .. } => *width,
        }
    }

    /// Number of gates for network forms, `None` for tables.
    pub fn gate_count(&self) -> Option<usize> {
        match self {
            PermSpec::Table { .. } => None,
            PermSpec::Gates { ops, .. } => Some(ops.len()),
            PermSpec::Circuit { depth, .. } => Some(*depth),
        }
    }

    pub fn validate(&self) -> Result<(), PermError> {
        match self {
            PermSpec::Table { table } => {
                let len = table.len();
                if !len.is_power_of_two() {
                    return Err(PermError::TableLength(len));
                }
                let m = len.trailing_zeros() as usize;
                if m > MAX_TABLE_WIDTH {
                    return Err(PermError::TableTooWide(m));
                }
                let mut seen = vec![false; len];
                for &v in table {
                    let slot = seen.get_mut(v as usize).ok_or(PermError::NotBijective(v))?;
                    if *slot {
                        return Err(PermError::NotBijective(v));
                    }
                    *slot = true;
                }
                Ok(())
            }
            PermSpec::Gates { width, ops, .. } => {
                for (k, g) in ops.iter().enumerate() {
                    let (wires, count) = g.wires();
                    let wires = &wires[..count];
                    if let Some(&w) = wires.iter().find(|&&w| w as usize >= *width) {
                        return Err(PermError::WireOutOfRange {
                            gate: k,
                            wire: w,
                            width: *width,
                        });
                    }
                    if (1..count).any(|i| wires[..i].contains(&wires[i])) {
                        return Err(PermError::WireClash(k));
                    }
                }
                Ok(())
            }
            PermSpec::Circuit { width, depth, .. } => {
                if *depth > 0 && *width == 0 {
                    return Err(PermError::TooNarrow {
                        kind: "X",
                        need: 1,
                        width: 0,
                    });
                }
                Ok(())
            }
        }
    }

    /// `π⁻¹`.
    pub fn inverse(&self) -> Self {
        match self {
            PermSpec::Table { table } => {
                let mut inv = vec![0u32; table.len()];
                for (x, &y) in table.iter().enumerate() {
                    inv[y as usize] = x as u32;
                }
                PermSpec::Table { table: inv }
            }
            PermSpec::Gates {
                width,
                ops,
                reversed,
                program,
            } => PermSpec::Gates {
                width: *width,
                ops: ops.clone(),
                reversed: !reversed,
                program: program.clone(),
            },
            PermSpec::Circuit {
                width,
                seed,
                depth,
                reversed,
            } => PermSpec::Circuit {
                width: *width,
                seed: *seed,
                depth: *depth,
                reversed: !reversed,
            },
        }
    }

    /// Expands a seeded network into an explicit gate list when it has at
    /// most [`MATERIALIZE_LIMIT`] gates; other forms are returned as is.
    pub fn materialize(&self) -> Self {
        match self {
            PermSpec::Circuit {
                width,
                seed,
                depth,
                reversed,
            } if *depth <= MATERIALIZE_LIMIT => {
                let mut ops = Vec::with_capacity(*depth);
                for chunk in 0..depth.div_ceil(CHUNK) {
                    ops.extend(seeded_chunk(*width, *seed, *depth, chunk));
                }
                PermSpec::Gates {
                    width: *width,
                    ops,
                    reversed: *reversed,
                    program: Program::default(),
                }
            }
            other => other.clone(),
        }
    }

    /// Applies `π` to bits `offset..offset + width` of `plane`.
    ///
    /// # Panics
    ///
    /// Panics if the window does not fit inside `plane`.
    pub fn apply_to(&self, plane: &mut BitVec, offset: usize) {
        let m = self.width();
        assert!(offset + m <= plane.len(), "permutation window out of range");
        match self {
            PermSpec::Table { table } => {
                let x = plane.get_bits(offset, m);
                plane.set_bits(offset, m, table[x as usize] as u64);
            }
            PermSpec::Gates {
                ops, reversed, program, ..
            } => {
                let prog = program.get(ops);
                with_window(plane, offset, m, |w| {
                    if *reversed {
                        prog.iter().rev().for_each(|&op| run_op(w, op));
                    } else {
                        prog.iter().for_each(|&op| run_op(w, op));
                    }
                });
            }
            PermSpec::Circuit {
                width,
                seed,
                depth,
                reversed,
            } => {
                let chunks = depth.div_ceil(CHUNK);
                with_window(plane, offset, m, |w| {
                    let mut run = |c: usize| {
                        let gates = seeded_chunk(*width, *seed, *depth, c);
                        if *reversed {
                            gates.iter().rev().for_each(|g| g.apply_words(w));
                        } else {
                            gates.iter().for_each(|g| g.apply_words(w));
                        }
                    };
                    if *reversed {
                        (0..chunks).rev().for_each(&mut run);
                    } else {
                        (0..chunks).for_each(&mut run);
                    }
                });
            }
        }
    }

    /// `π(x)` for a standalone value.
    pub fn map(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.width(), "value width does not match permutation");
        let mut out = x.clone();
        self.apply_to(&mut out, 0);
        out
    }

    /// `π(x)` for widths up to 64, without allocating for table and gate forms.
    pub fn map_u64(&self, x: u64) -> u64 {
        let m = self.width();
        assert!(m <= 64);
        match self {
            PermSpec::Table { table } => table[x as usize] as u64,
            PermSpec::Gates { ops, reversed, .. } => {
                if *reversed {
                    ops.iter().rev().fold(x, |acc, g| g.apply_u64(acc))
                } else {
                    ops.iter().fold(x, |acc, g| g.apply_u64(acc))
                }
            }
            PermSpec::Circuit { .. } => self.map(&BitVec::from_u64(m, x)).to_u64().unwrap(),
        }
    }
}

// Chunk `c` of a seeded network: gates `c*CHUNK ..` drawn from stream `c`.
fn seeded_chunk(width: usize, seed: u64, depth: usize, c: usize) -> Vec<RevGate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(c as u64);
    let len = CHUNK.min(depth - c * CHUNK);
    (0..len).map(|_| RevGate::random(width, &mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use proptest::prelude::*;

    #[test]
    fn table_validation() {
        assert!(PermSpec::from_table(vec![1, 0, 3, 2]).is_ok());
        assert_eq!(PermSpec::from_table(vec![0, 1, 2]), Err(PermError::TableLength(3)));
        assert_eq!(PermSpec::from_table(vec![0, 0]), Err(PermError::NotBijective(0)));
        assert_eq!(PermSpec::from_table(vec![0, 2]), Err(PermError::NotBijective(2)));
    }

    #[test]
    fn gate_validation() {
        assert!(PermSpec::from_gates(3, vec![RevGate::Toffoli(0, 1, 2)]).is_ok());
        assert_eq!(
            PermSpec::from_gates(2, vec![RevGate::Cnot(0, 2)]),
            Err(PermError::WireOutOfRange { gate: 0, wire: 2, width: 2 })
        );
        assert_eq!(
            PermSpec::from_gates(3, vec![RevGate::X(0), RevGate::Toffoli(1, 1, 2)]),
            Err(PermError::WireClash(1))
        );
    }

    #[test]
    fn default_depth_formula() {
        // 10 · 512 · log2(513)
        assert_eq!(default_depth(512, 10.0), 46_095);
        assert_eq!(default_depth(1, 10.0), 10);
    }

    #[test]
    fn table_inverse_composes_to_identity() {
        let mut rng = RngStream::new(1, 0);
        for m in 0..=6 {
            let p = PermSpec::random_table(m, &mut rng);
            let q = p.inverse();
            for x in 0..1u64 << m {
                assert_eq!(q.map_u64(p.map_u64(x)), x);
            }
        }
    }

    #[test]
    fn streamed_and_materialized_agree() {
        let mut rng = RngStream::new(2, 0);
        let p = PermSpec::random_circuit(40, 3 * CHUNK + 17, &mut rng);
        let m = p.materialize();
        assert!(matches!(m, PermSpec::Gates { .. }));
        for _ in 0..20 {
            let x = BitVec::random(40, &mut rng);
            assert_eq!(p.map(&x), m.map(&x));
            assert_eq!(p.inverse().map(&x), m.inverse().map(&x));
            assert_eq!(p.inverse().map(&p.map(&x)), x);
        }
    }

    #[test]
    fn narrow_networks_only_use_fitting_gates() {
        let mut rng = RngStream::new(3, 0);
        for w in 1..=3 {
            let p = PermSpec::random_circuit(w, 500, &mut rng).materialize();
            p.validate().unwrap();
        }
    }

    #[test]
    fn serde_forms() {
        let t = PermSpec::from_table(vec![1, 0]).unwrap();
        assert_eq!(serde_json::to_string(&t).unwrap(), r#"{"form":"table","table":[1,0]}"#);
        let c = PermSpec::Circuit { width: 9, seed: 5, depth: 30, reversed: false };
        let js = serde_json::to_string(&c).unwrap();
        assert_eq!(js, r#"{"form":"circuit","width":9,"seed":5,"depth":30}"#);
        assert_eq!(serde_json::from_str::<PermSpec>(&js).unwrap(), c);
        let g = PermSpec::from_gates(3, vec![RevGate::X(0), RevGate::Toffoli(0, 1, 2)]).unwrap();
        let js = serde_json::to_string(&g).unwrap();
        assert_eq!(serde_json::from_str::<PermSpec>(&js).unwrap(), g);
    }

    proptest! {
        #[test]
        fn network_is_a_bijection(seed in any::<u64>(), width in 1usize..=6, depth in 0usize..60) {
            let p = PermSpec::Circuit { width, seed, depth, reversed: false };
            let mut seen = vec![false; 1 << width];
            for x in 0..1u64 << width {
                let y = p.map_u64(x) as usize;
                prop_assert!(!seen[y]);
                seen[y] = true;
            }
        }

        #[test]
        fn wide_network_inverse(seed in any::<u64>(), width in 1usize..=512) {
            let mut rng = RngStream::new(seed, 1);
            let p = PermSpec::random_circuit(width, default_depth(width, 1.0), &mut rng);
            let x = BitVec::random(width, &mut rng);
            prop_assert_eq!(p.inverse().map(&p.map(&x)), x);
        }
    }

    #[test]
    fn compiled_program_follows_gate_list_changes() {
        let mut spec = PermSpec::from_gates(3, vec![RevGate::X(0)]).unwrap();
        assert_eq!(spec.map_u64(0), 1);
        let mut plane = BitVec::zeros(3);
        spec.apply_to(&mut plane, 0);
        assert_eq!(plane.to_u64(), Some(1));
        if let PermSpec::Gates { ops, .. } = &mut spec {
            ops.push(RevGate::Cnot(0, 2));
        }
        let mut plane = BitVec::zeros(3);
        spec.apply_to(&mut plane, 0);
        assert_eq!(plane.to_u64(), Some(0b101));
        // The inverse shares the cache and runs it backwards.
        let inv = spec.inverse();
        inv.apply_to(&mut plane, 0);
        assert!(plane.is_zero());
    }
}
