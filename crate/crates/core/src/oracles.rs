//! Deutsch-Jozsa and Simon oracles.
//!
//! An [`Oracle`] is a black box: callers can apply it to a register, query it
//! on a classical input, and read how many times it has been called. Each call
//! of either kind counts as one query.
//!
//! Deutsch-Jozsa register layout (`n + 1` wires): query `0..n`, target `n`.
//! The balanced construction is `π` on the query, a CNOT from the most
//! significant query wire to the target, then `π⁻¹`, so `f(x) = π(x)_{n-1}`.
//! A constant-zero oracle is empty and a constant-one oracle is a single X on
//! the target.
//!
//! Simon register layout (`2n` wires): query `0..n`, answer `n..2n`. The oracle
//! owns an `n`-wire ancilla and runs `U_s`, `π` on the ancilla, a bitwise CNOT
//! ancilla→answer, `π⁻¹`, `U_s⁻¹`. `U_s` has one CNOT from query wire `j` to
//! ancilla wire `k` for every set bit `j` of basis row `v^k`, where `{v^k}` is
//! [`orthogonal_complement_basis`]`(s)`. The net effect is
//! `(x, p), (z, w) ↦ (x, p ⊕ Σ_k w_k v^k), (z ⊕ f(x), w)` with
//! `f(x) = π(x·v^0, x·v^1, …)`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, GateOp};
use crate::gf2::{orthogonal_complement_basis, BitVec};
use crate::perm::{default_depth, PermError, PermSpec};
use crate::register::{QslError, QslRegister};
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle width must be at least 1")]
    ZeroWidth,
    #[error("secret has {found} bits, expected {expected}")]
    SecretWidth { expected: usize, found: usize },
    #[error("permutation covers {found} wires, expected {expected}")]
    PermWidth { expected: usize, found: usize },
    #[error("invalid permutation: {0}")]
    Perm(#[from] PermError),
    #[error("register has {found} wires, oracle expects {expected}")]
    RegisterWidth { expected: usize, found: usize },
    #[error(transparent)]
    Qsl(#[from] QslError),
}

/// Which function a Deutsch-Jozsa oracle embeds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DjKind {
    Constant0,
    Constant1,
    /// `f(x) = π(x)_{n-1}`.
    Balanced(PermSpec),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DjSpecRepr", into = "DjSpecRepr")]
pub struct DjOracleSpec {
    pub n: usize,
    pub kind: DjKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum DjKindTag {
    Constant0,
    Constant1,
    Balanced,
}

#[derive(Serialize, Deserialize)]
struct DjSpecRepr {
    n: usize,
    kind: DjKindTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    perm: Option<PermSpec>,
}

impl From<DjOracleSpec> for DjSpecRepr {
    fn from(s: DjOracleSpec) -> Self {
        let (kind, perm) = match s.kind {
            DjKind::Constant0 => (DjKindTag::Constant0, None),
            DjKind::Constant1 => (DjKindTag::Constant1, None),
            DjKind::Balanced(p) => (DjKindTag::Balanced, Some(p)),
        };
        DjSpecRepr { n: s.n, kind, perm }
    }
}

impl TryFrom<DjSpecRepr> for DjOracleSpec {
    type Error = String;

    fn try_from(r: DjSpecRepr) -> Result<Self, Self::Error> {
        let kind = match (r.kind, r.perm) {
            (DjKindTag::Constant0, None) => DjKind::Constant0,
            (DjKindTag::Constant1, None) => DjKind::Constant1,
            (DjKindTag::Balanced, Some(p)) => DjKind::Balanced(p),
            (DjKindTag::Balanced, None) => return Err("balanced oracle needs a perm".into()),
            (_, Some(_)) => return Err("constant oracle takes no perm".into()),
        };
        DjOracleSpec::new(r.n, kind).map_err(|e| e.to_string())
    }
}

impl DjOracleSpec {
    pub fn new(n: usize, kind: DjKind) -> Result<Self, OracleError> {
        let spec = Self { n, kind };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        if self.n == 0 {
            return Err(OracleError::ZeroWidth);
        }
        if let DjKind::Balanced(p) = &self.kind {
            if p.width() != self.n {
                return Err(OracleError::PermWidth {
                    expected: self.n,
                    found: p.width(),
                });
            }
            p.validate()?;
        }
        Ok(())
    }

    pub fn is_constant(&self) -> bool {
        !matches!(self.kind, DjKind::Balanced(_))
    }

    /// `f(x)` computed directly from the definition, without any QSL machinery.
    pub fn evaluate(&self, x: &BitVec) -> bool {
        match &self.kind {
            DjKind::Constant0 => false,
            DjKind::Constant1 => true,
            DjKind::Balanced(p) => p.map(x).get(self.n - 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SimonSpecRepr")]
pub struct SimonOracleSpec {
    pub n: usize,
    /// All zeros for a one-to-one function.
    pub secret: BitVec,
    pub perm: PermSpec,
}

#[derive(Deserialize)]
struct SimonSpecRepr {
    n: usize,
    secret: BitVec,
    perm: PermSpec,
}

impl TryFrom<SimonSpecRepr> for SimonOracleSpec {
    type Error = String;

    fn try_from(r: SimonSpecRepr) -> Result<Self, Self::Error> {
        let spec = SimonOracleSpec {
            n: r.n,
            secret: r.secret,
            perm: r.perm,
        };
        spec.validate().map_err(|e| e.to_string())?;
        Ok(spec)
    }
}

impl SimonOracleSpec {
    pub fn new(secret: BitVec, perm: PermSpec) -> Result<Self, OracleError> {
        let spec = Self {
            n: secret.len(),
            secret,
            perm,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        if self.n == 0 {
            return Err(OracleError::ZeroWidth);
        }
        if self.secret.len() != self.n {
            return Err(OracleError::SecretWidth {
                expected: self.n,
                found: self.secret.len(),
            });
        }
        if self.perm.width() != self.n {
            return Err(OracleError::PermWidth {
                expected: self.n,
                found: self.perm.width(),
            });
        }
        self.perm.validate()?;
        Ok(())
    }

    /// `f'(x)`: inner products of `x` with the complement basis rows.
    pub fn hidden_linear(&self, x: &BitVec) -> BitVec {
        let basis = orthogonal_complement_basis(&self.secret);
        let mut a = BitVec::zeros(self.n);
        for (k, row) in basis.rows().iter().enumerate() {
            a.set(k, row.dot(x).expect("widths checked"));
        }
        a
    }

    /// `f(x) = π(f'(x))` computed directly from the definition.
    pub fn evaluate(&self, x: &BitVec) -> BitVec {
        self.perm.map(&self.hidden_linear(x))
    }
}

/// Any oracle spec, tagged by family for serialization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum OracleSpec {
    Dj(DjOracleSpec),
    Simon(SimonOracleSpec),
}

impl OracleSpec {
    pub fn n(&self) -> usize {
        match self {
            OracleSpec::Dj(s) => s.n,
            OracleSpec::Simon(s) => s.n,
        }
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        match self {
            OracleSpec::Dj(s) => s.validate(),
            OracleSpec::Simon(s) => s.validate(),
        }
    }
}

/// The gate-level Deutsch-Jozsa oracle on `n + 1` wires.
pub fn dj_circuit(spec: &DjOracleSpec) -> Result<Circuit, OracleError> {
    spec.validate()?;
    let n = spec.n;
    let mut c = Circuit::new(n + 1);
    match &spec.kind {
        DjKind::Constant0 => {}
        DjKind::Constant1 => c.push(GateOp::X(n))?,
        DjKind::Balanced(p) => {
            let p = p.materialize();
            let inv = p.inverse();
            c.push(GateOp::perm(p, 0))?;
            c.push(GateOp::cnot(n - 1, n))?;
            c.push(GateOp::perm(inv, 0))?;
        }
    }
    Ok(c)
}

/// The gate-level Simon oracle on `3n` wires: query, answer, ancilla.
pub fn simon_circuit(spec: &SimonOracleSpec) -> Result<Circuit, OracleError> {
    spec.validate()?;
    let n = spec.n;
    let ancilla = 2 * n;
    let basis = orthogonal_complement_basis(&spec.secret);
    let u_s: Vec<GateOp> = basis
        .rows()
        .iter()
        .enumerate()
        .flat_map(|(k, row)| row.iter_ones().map(move |j| GateOp::cnot(j, ancilla + k)))
        .collect();

    let p = spec.perm.materialize();
    let inv = p.inverse();
    let mut c = Circuit::new(3 * n);
    for op in &u_s {
        c.push(op.clone())?;
    }
    c.push(GateOp::perm(p, ancilla))?;
    for k in 0..n {
        c.push(GateOp::cnot(ancilla + k, n + k))?;
    }
    c.push(GateOp::perm(inv, ancilla))?;
    for op in u_s.into_iter().rev() {
        c.push(op)?;
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleFamily {
    DeutschJozsa,
    Simon,
}

/// A query-counting black-box oracle.
#[derive(Clone, Debug)]
pub struct Oracle {
    family: OracleFamily,
    n: usize,
    circuit: Circuit,
    ancilla: Option<QslRegister>,
    queries: u64,
}

pub fn build_dj_oracle(spec: &DjOracleSpec) -> Result<Oracle, OracleError> {
    Ok(Oracle {
        family: OracleFamily::DeutschJozsa,
        n: spec.n,
        circuit: dj_circuit(spec)?,
        ancilla: None,
        queries: 0,
    })
}

/// The ancilla's phase bits are drawn from `rng` once, here, and never reset.
pub fn build_simon_oracle(spec: &SimonOracleSpec, rng: &mut RngStream) -> Result<Oracle, OracleError> {
    Ok(Oracle {
        family: OracleFamily::Simon,
        n: spec.n,
        circuit: simon_circuit(spec)?,
        ancilla: Some(QslRegister::prepare_z(&BitVec::zeros(spec.n), rng)),
        queries: 0,
    })
}

pub fn build_oracle(spec: &OracleSpec, rng: &mut RngStream) -> Result<Oracle, OracleError> {
    match spec {
        OracleSpec::Dj(s) => build_dj_oracle(s),
        OracleSpec::Simon(s) => build_simon_oracle(s, rng),
    }
}

impl Oracle {
    pub fn family(&self) -> OracleFamily {
        self.family
    }

    /// Input width `n`.
    pub fn input_width(&self) -> usize {
        self.n
    }

    /// Output width: 1 for Deutsch-Jozsa, `n` for Simon.
    pub fn output_width(&self) -> usize {
        match self.family {
            OracleFamily::DeutschJozsa => 1,
            OracleFamily::Simon => self.n,
        }
    }

    /// Width of the register passed to [`Oracle::apply`].
    pub fn register_width(&self) -> usize {
        self.n + self.output_width()
    }

    pub fn query_count(&self) -> u64 {
        self.queries
    }

    /// Applies the oracle to a query+answer register. Counts as one query.
    pub fn apply(&mut self, reg: &mut QslRegister) -> Result<(), OracleError> {
        let width = self.register_width();
        if reg.len() != width {
            return Err(OracleError::RegisterWidth {
                expected: width,
                found: reg.len(),
            });
        }
        self.queries += 1;
        match &mut self.ancilla {
            None => reg.apply_circuit(&self.circuit)?,
            Some(ancilla) => {
                reg.append(ancilla);
                reg.apply_circuit(&self.circuit)?;
                *ancilla = reg.split_off(width);
                debug_assert!(ancilla.computational().is_zero(), "ancilla not uncomputed");
            }
        }
        Ok(())
    }

    /// `f(x)`: prepares `|x⟩|0⟩`, applies the oracle once and reads the answer.
    pub fn classical_query(&mut self, x: &BitVec, rng: &mut RngStream) -> Result<BitVec, OracleError> {
        if x.len() != self.n {
            return Err(OracleError::RegisterWidth {
                expected: self.n,
                found: x.len(),
            });
        }
        let mut input = x.clone();
        input.extend_from(&BitVec::zeros(self.output_width()));
        let mut reg = QslRegister::prepare_z(&input, rng);
        self.apply(&mut reg)?;
        Ok(reg.measure_z_range(self.n..self.register_width(), rng)?)
    }

    #[cfg(test)]
    fn ancilla(&self) -> Option<&QslRegister> {
        self.ancilla.as_ref()
    }
}

/// How random permutations are drawn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PermPolicy {
    /// Gate count factor `c` in `c · n · log2(n + 1)` for network permutations.
    pub depth_factor: f64,
    /// Widths up to this use a uniformly random table.
    pub table_max_width: usize,
}

impl Default for PermPolicy {
    fn default() -> Self {
        Self {
            depth_factor: 10.0,
            table_max_width: 12,
        }
    }
}

impl PermPolicy {
    pub fn random_perm<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> PermSpec {
        if n <= self.table_max_width {
            PermSpec::random_table(n, rng)
        } else {
            PermSpec::random_circuit(n, default_depth(n, self.depth_factor), rng)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DjKindChoice {
    /// Constant or balanced with probability 1/2 each.
    #[default]
    Any,
    /// Constant 0 or 1 with probability 1/2 each.
    Constant,
    Constant0,
    Constant1,
    Balanced,
}

pub fn random_dj_spec<R: Rng + ?Sized>(
    n: usize,
    choice: DjKindChoice,
    policy: &PermPolicy,
    rng: &mut R,
) -> Result<DjOracleSpec, OracleError> {
    let choice = match choice {
        DjKindChoice::Any => {
            if rng.gen::<bool>() {
                DjKindChoice::Balanced
            } else {
                DjKindChoice::Constant
            }
        }
        c => c,
    };
    let kind = match choice {
        DjKindChoice::Constant0 => DjKind::Constant0,
        DjKindChoice::Constant1 => DjKind::Constant1,
        DjKindChoice::Constant if rng.gen::<bool>() => DjKind::Constant1,
        DjKindChoice::Constant => DjKind::Constant0,
        _ => DjKind::Balanced(policy.random_perm(n, rng)),
    };
    DjOracleSpec::new(n, kind)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SecretChoice {
    /// Uniform over all `2^n` strings, zero included.
    Any,
    /// Uniform over nonzero strings.
    #[default]
    Nonzero,
    Zero,
}

pub fn random_simon_spec<R: Rng + ?Sized>(
    n: usize,
    choice: SecretChoice,
    policy: &PermPolicy,
    rng: &mut R,
) -> Result<SimonOracleSpec, OracleError> {
    if n == 0 {
        return Err(OracleError::ZeroWidth);
    }
    let secret = match choice {
        SecretChoice::Zero => BitVec::zeros(n),
        SecretChoice::Any => BitVec::random(n, rng),
        SecretChoice::Nonzero => loop {
            let s = BitVec::random(n, rng);
            if !s.is_zero() {
                break s;
            }
        },
    };
    SimonOracleSpec::new(secret, policy.random_perm(n, rng))
}
