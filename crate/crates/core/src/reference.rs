//! Dense statevector simulator for small widths.
//!
//! This is a test oracle: it knows nothing about QSL bit pairs and builds its
//! oracle unitaries straight from the spec's classical function, so agreement
//! with the QSL engine is meaningful.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::ops::Range;

use num_complex::Complex64;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::algorithms::{self, DjVerdict, SolveError};
use crate::circuit::{Circuit, GateOp};
use crate::gf2::BitVec;
use crate::oracles::{build_dj_oracle, build_simon_oracle, simon_circuit, DjOracleSpec, OracleError, SimonOracleSpec};
use crate::rng::RngStream;

pub const MAX_QUBITS: usize = 14;
pub const MAX_DJ_N: usize = 10;
pub const MAX_SIMON_N: usize = 6;
/// Widest Simon instance simulated gate by gate, ancilla included.
pub const MAX_SIMON_GATE_N: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReferenceError {
    #[error("{qubits} qubits exceeds the statevector cap of {MAX_QUBITS}")]
    TooWide { qubits: usize },
    #[error("qubit {index} out of range for {width} qubits")]
    IndexOutOfRange { index: usize, width: usize },
    #[error("gate touches qubit {0} twice")]
    IndexClash(usize),
    #[error("no samples to compare")]
    EmptySample,
    #[error("sample outcome {outcome} does not fit in {width} bits")]
    OutcomeWidth { outcome: u64, width: usize },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The basis state `|index⟩`; bit `i` of `index` is qubit `i`.
    pub fn basis(qubits: usize, index: u64) -> Result<Self, ReferenceError> {
        if qubits > MAX_QUBITS {
            return Err(ReferenceError::TooWide { qubits });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << qubits];
        amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { qubits, amps })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check(&self, i: usize) -> Result<usize, ReferenceError> {
        if i >= self.qubits {
            return Err(ReferenceError::IndexOutOfRange {
                index: i,
                width: self.qubits,
            });
        }
        Ok(1 << i)
    }

    pub fn apply_x(&mut self, i: usize) -> Result<(), ReferenceError> {
        let bit = self.check(i)?;
        self.apply_basis_map(|b| b ^ bit as u64);
        Ok(())
    }

    pub fn apply_z(&mut self, i: usize) -> Result<(), ReferenceError> {
        let bit = self.check(i)?;
        for (b, a) in self.amps.iter_mut().enumerate() {
            if b & bit != 0 {
                *a = -*a;
            }
        }
        Ok(())
    }

    pub fn apply_h(&mut self, i: usize) -> Result<(), ReferenceError> {
        let bit = self.check(i)?;
        for b in 0..self.amps.len() {
            if b & bit == 0 {
                let (a0, a1) = (self.amps[b], self.amps[b | bit]);
                self.amps[b] = (a0 + a1) * FRAC_1_SQRT_2;
                self.amps[b | bit] = (a0 - a1) * FRAC_1_SQRT_2;
            }
        }
        Ok(())
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<(), ReferenceError> {
        let c = self.check(control)? as u64;
        let t = self.check(target)? as u64;
        if c == t {
            return Err(ReferenceError::IndexClash(control));
        }
        self.apply_basis_map(|b| if b & c != 0 { b ^ t } else { b });
        Ok(())
    }

    pub fn apply_toffoli(&mut self, c1: usize, c2: usize, target: usize) -> Result<(), ReferenceError> {
        let a = self.check(c1)? as u64;
        let b = self.check(c2)? as u64;
        let t = self.check(target)? as u64;
        if a == b || a == t {
            return Err(ReferenceError::IndexClash(c1));
        }
        if b == t {
            return Err(ReferenceError::IndexClash(c2));
        }
        self.apply_basis_map(|x| if x & a != 0 && x & b != 0 { x ^ t } else { x });
        Ok(())
    }

    /// Applies `Σ_b |map(b)⟩⟨b|`. `map` must be a bijection on `0..2^m`.
    pub fn apply_basis_map(&mut self, map: impl Fn(u64) -> u64) {
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (b, a) in self.amps.iter().enumerate() {
            out[map(b as u64) as usize] = *a;
        }
        self.amps = out;
    }

    pub fn apply_gate_q(&mut self, op: &GateOp) -> Result<(), ReferenceError> {
        match op {
            GateOp::X(i) => self.apply_x(*i),
            GateOp::Z(i) => self.apply_z(*i),
            GateOp::H(i) => self.apply_h(*i),
            GateOp::Cnot { control, target } => self.apply_cnot(*control, *target),
            GateOp::Toffoli { c1, c2, target } => self.apply_toffoli(*c1, *c2, *target),
            GateOp::Perm { spec, wires } => {
                if wires.end > self.qubits {
                    return Err(ReferenceError::IndexOutOfRange {
                        index: wires.end,
                        width: self.qubits,
                    });
                }
                let (lo, width) = (wires.start, wires.len());
                let mask = ((1u64 << width) - 1) << lo;
                self.apply_basis_map(|b| {
                    let sub = (b & mask) >> lo;
                    (b & !mask) | (spec.map_u64(sub) << lo)
                });
                Ok(())
            }
        }
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<(), ReferenceError> {
        if circuit.width() > self.qubits {
            return Err(ReferenceError::IndexOutOfRange {
                index: circuit.width() - 1,
                width: self.qubits,
            });
        }
        for op in circuit.ops() {
            self.apply_gate_q(op)?;
        }
        Ok(())
    }

    /// Outcome distribution of a computational-basis measurement of `wires`.
    pub fn marginal(&self, wires: Range<usize>) -> Distribution {
        let width = wires.len();
        let mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
        let mut probs = BTreeMap::new();
        for (b, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 1e-12 {
                *probs.entry((b as u64 >> wires.start) & mask).or_insert(0.0) += p;
            }
        }
        Distribution { width, probs }
    }
}

/// Outcome probabilities over `width`-bit strings. Outcome bit `i` is wire
/// `i` of the measured range.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    width: usize,
    probs: BTreeMap<u64, f64>,
}

impl Distribution {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn probabilities(&self) -> &BTreeMap<u64, f64> {
        &self.probs
    }

    pub fn prob(&self, outcome: u64) -> f64 {
        self.probs.get(&outcome).copied().unwrap_or(0.0)
    }

    /// Outcomes with nonzero probability, ascending.
    pub fn support(&self) -> Vec<u64> {
        self.probs.keys().copied().collect()
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, p) in &self.probs {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{}: {p:.4}", BitVec::from_u64(self.width, *k))?;
        }
        Ok(())
    }
}

/// `|x⟩|z⟩ ↦ |x⟩|z ⊕ f(x)⟩` as a basis permutation, with `f` tabulated from
/// the spec. Query bits are the low `n` bits of a basis index, answer bits the
/// next `output_width`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionOracle {
    n: usize,
    output_width: usize,
    table: Vec<u64>,
}

impl FunctionOracle {
    pub fn dj(spec: &DjOracleSpec) -> Result<Self, ReferenceError> {
        spec.validate()?;
        if spec.n + 1 > MAX_QUBITS {
            return Err(ReferenceError::TooWide { qubits: spec.n + 1 });
        }
        let table = (0..1u64 << spec.n)
            .map(|x| spec.evaluate(&BitVec::from_u64(spec.n, x)) as u64)
            .collect();
        Ok(Self {
            n: spec.n,
            output_width: 1,
            table,
        })
    }

    pub fn simon(spec: &SimonOracleSpec) -> Result<Self, ReferenceError> {
        spec.validate()?;
        if 2 * spec.n > MAX_QUBITS {
            return Err(ReferenceError::TooWide { qubits: 2 * spec.n });
        }
        let table = (0..1u64 << spec.n)
            .map(|x| spec.evaluate(&BitVec::from_u64(spec.n, x)).to_u64().expect("n <= 7"))
            .collect();
        Ok(Self {
            n: spec.n,
            output_width: spec.n,
            table,
        })
    }

    pub fn qubits(&self) -> usize {
        self.n + self.output_width
    }

    /// Image of basis index `b`; bits above the answer register pass through.
    pub fn map(&self, b: u64) -> u64 {
        let low = (1u64 << self.n) - 1;
        b ^ (self.table[(b & low) as usize] << self.n)
    }

    pub fn apply(&self, state: &mut StateVector) -> Result<(), ReferenceError> {
        if state.qubits() < self.qubits() {
            return Err(ReferenceError::IndexOutOfRange {
                index: self.qubits() - 1,
                width: state.qubits(),
            });
        }
        state.apply_basis_map(|b| self.map(b));
        Ok(())
    }
}

/// Exact distribution of the Deutsch-Jozsa query-register readout, with the
/// oracle applied as a [`FunctionOracle`].
pub fn dj_quantum_distribution(spec: &DjOracleSpec) -> Result<Distribution, ReferenceError> {
    let n = spec.n;
    if n > MAX_DJ_N {
        return Err(ReferenceError::TooWide { qubits: n + 1 });
    }
    let oracle = FunctionOracle::dj(spec)?;
    let mut state = StateVector::basis(n + 1, 1 << n)?;
    for i in 0..=n {
        state.apply_h(i)?;
    }
    oracle.apply(&mut state)?;
    for i in 0..n {
        state.apply_h(i)?;
    }
    Ok(state.marginal(0..n))
}

/// Exact distribution of one Simon subroutine readout, with the oracle
/// applied as a [`FunctionOracle`] on `2n` qubits.
pub fn simon_quantum_distribution(spec: &SimonOracleSpec) -> Result<Distribution, ReferenceError> {
    let n = spec.n;
    if n > MAX_SIMON_N {
        return Err(ReferenceError::TooWide { qubits: 2 * n });
    }
    let oracle = FunctionOracle::simon(spec)?;
    let mut state = StateVector::basis(2 * n, 0)?;
    for i in 0..n {
        state.apply_h(i)?;
    }
    oracle.apply(&mut state)?;
    for i in 0..n {
        state.apply_h(i)?;
    }
    Ok(state.marginal(0..n))
}

/// The same readout distribution, but pushing the gate-level `3n`-wire Simon
/// circuit (ancilla included) through the statevector simulator.
pub fn simon_circuit_distribution(spec: &SimonOracleSpec) -> Result<Distribution, ReferenceError> {
    let n = spec.n;
    if n > MAX_SIMON_GATE_N {
        return Err(ReferenceError::TooWide { qubits: 3 * n });
    }
    let circuit = simon_circuit(spec)?;
    let mut state = StateVector::basis(3 * n, 0)?;
    for i in 0..n {
        state.apply_h(i)?;
    }
    state.apply_circuit(&circuit)?;
    for i in 0..n {
        state.apply_h(i)?;
    }
    Ok(state.marginal(0..n))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Comparison {
    pub samples: u64,
    /// Total-variation distance between the exact and empirical distributions.
    pub tvd: f64,
    /// Pearson chi-square p-value over the exact support; 0 if any sample
    /// landed outside it.
    pub chi2_p: f64,
    /// Whether the observed outcomes are exactly the exact support.
    pub support_equal: bool,
}

/// Compares sample counts against an exact distribution.
pub fn compare_distributions(p: &Distribution, counts: &BTreeMap<u64, u64>) -> Result<Comparison, ReferenceError> {
    let samples: u64 = counts.values().sum();
    if samples == 0 {
        return Err(ReferenceError::EmptySample);
    }
    if let Some(&outcome) = counts.keys().find(|&&k| p.width < 64 && k >> p.width != 0) {
        return Err(ReferenceError::OutcomeWidth { outcome, width: p.width });
    }
    let total = samples as f64;
    let mut tvd = 0.0;
    let mut chi2 = 0.0;
    let mut outside = false;
    for (k, &prob) in &p.probs {
        let observed = counts.get(k).copied().unwrap_or(0) as f64;
        tvd += (observed / total - prob).abs();
        let expected = prob * total;
        chi2 += (observed - expected).powi(2) / expected;
    }
    for (k, &c) in counts {
        if !p.probs.contains_key(k) && c > 0 {
            outside = true;
            tvd += c as f64 / total;
        }
    }
    let observed_support: Vec<u64> = counts.iter().filter(|(_, &c)| c > 0).map(|(k, _)| *k).collect();
    let support_equal = observed_support == p.support();
    let dof = p.probs.len().saturating_sub(1);
    let chi2_p = if outside {
        0.0
    } else if dof == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
        1.0 - dist.cdf(chi2)
    };
    Ok(Comparison {
        samples,
        tvd: tvd / 2.0,
        chi2_p,
        support_equal,
    })
}

/// Counts samples keyed by their `u64` value.
pub fn tally<'a>(samples: impl IntoIterator<Item = &'a BitVec>) -> BTreeMap<u64, u64> {
    let mut counts = BTreeMap::new();
    for s in samples {
        *counts.entry(s.to_u64().expect("sample wider than 64 bits")).or_insert(0) += 1;
    }
    counts
}

/// Draws `samples` QSL subroutine outputs for `spec` and compares them with
/// the exact quantum distribution.
pub fn simon_agreement(
    spec: &SimonOracleSpec,
    samples: usize,
    rng: &mut RngStream,
) -> Result<(Distribution, Comparison), ReferenceError> {
    let exact = simon_quantum_distribution(spec)?;
    let mut oracle = build_simon_oracle(spec, rng)?;
    let mut outputs = Vec::with_capacity(samples);
    for _ in 0..samples {
        outputs.push(algorithms::simon_subroutine(&mut oracle, rng)?);
    }
    let cmp = compare_distributions(&exact, &tally(&outputs))?;
    Ok((exact, cmp))
}

/// The quantum verdict (`P(0^n)` is exactly 0 or 1) next to the QSL verdicts
/// of `runs` independent runs. `None` if the quantum outcome is not a point
/// mass on a verdict.
pub fn dj_agreement(
    spec: &DjOracleSpec,
    runs: usize,
    rng: &mut RngStream,
) -> Result<(Option<DjVerdict>, Vec<DjVerdict>), ReferenceError> {
    let p_zero = dj_quantum_distribution(spec)?.prob(0);
    let quantum = if (p_zero - 1.0).abs() < 1e-9 {
        Some(DjVerdict::Constant)
    } else if p_zero < 1e-9 {
        Some(DjVerdict::Balanced)
    } else {
        None
    };
    let mut qsl = Vec::with_capacity(runs);
    for _ in 0..runs {
        let mut oracle = build_dj_oracle(spec)?;
        qsl.push(algorithms::deutsch_jozsa(&mut oracle, rng)?.verdict);
    }
    Ok((quantum, qsl))
}
