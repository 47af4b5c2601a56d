//! Symbolic gate sequences.

use std::ops::Range;
use std::sync::Arc;

use crate::perm::PermSpec;
use crate::register::QslError;

/// One QSL gate. Wire indices are register positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GateOp {
    X(usize),
    Z(usize),
    H(usize),
    Cnot { control: usize, target: usize },
    Toffoli { c1: usize, c2: usize, target: usize },
    /// Computational-plane permutation on a contiguous block of wires.
    Perm { spec: Arc<PermSpec>, wires: Range<usize> },
}

impl GateOp {
    pub fn cnot(control: usize, target: usize) -> Self {
        GateOp::Cnot { control, target }
    }

    pub fn toffoli(c1: usize, c2: usize, target: usize) -> Self {
        GateOp::Toffoli { c1, c2, target }
    }

    pub fn perm(spec: PermSpec, start: usize) -> Self {
        let wires = start..start + spec.width();
        GateOp::Perm {
            spec: Arc::new(spec),
            wires,
        }
    }

    /// Checks that every wire is below `width` and no wire repeats.
    pub fn validate(&self, width: usize) -> Result<(), QslError> {
        let check = |i: usize| {
            if i >= width {
                Err(QslError::IndexOutOfRange { index: i, width })
            } else {
                Ok(())
            }
        };
        match self {
            GateOp::X(i) | GateOp::Z(i) | GateOp::H(i) => check(*i),
            GateOp::Cnot { control, target } => {
                check(*control)?;
                check(*target)?;
                if control == target {
                    return Err(QslError::IndexClash(*control));
                }
                Ok(())
            }
            GateOp::Toffoli { c1, c2, target } => {
                for i in [c1, c2, target] {
                    check(*i)?;
                }
                if c1 == c2 || c1 == target {
                    return Err(QslError::IndexClash(*c1));
                }
                if c2 == target {
                    return Err(QslError::IndexClash(*c2));
                }
                Ok(())
            }
            GateOp::Perm { spec, wires } => {
                if wires.end > width || wires.start > wires.end {
                    return Err(QslError::IndexOutOfRange {
                        index: wires.end,
                        width,
                    });
                }
                if spec.width() != wires.len() {
                    return Err(QslError::PermWidth {
                        perm: spec.width(),
                        wires: wires.len(),
                    });
                }
                Ok(())
            }
        }
    }

    /// Every gate is self-inverse except PERM, which inverts its spec.
    pub fn inverse(&self) -> GateOp {
        match self {
            GateOp::Perm { spec, wires } => GateOp::Perm {
                spec: Arc::new(spec.inverse()),
                wires: wires.clone(),
            },
            other => other.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    width: usize,
    ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            ops: Vec::new(),
        }
    }

    pub fn from_ops(width: usize, ops: Vec<GateOp>) -> Result<Self, QslError> {
        let mut c = Self::new(width);
        for op in ops {
            c.push(op)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, op: GateOp) -> Result<(), QslError> {
        op.validate(self.width)?;
        self.ops.push(op);
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// The inverse circuit: ops in reverse order, each inverted.
    pub fn reverse(&self) -> Circuit {
        Circuit {
            width: self.width,
            ops: self.ops.iter().rev().map(GateOp::inverse).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::BitVec;
    use crate::register::QslRegister;
    use crate::rng::RngStream;
    use rand::Rng;

    fn all_states(width: usize) -> impl Iterator<Item = QslRegister> {
        (0..1u64 << (2 * width)).map(move |s| {
            QslRegister::prepare_full(
                BitVec::from_u64(width, s & ((1 << width) - 1)),
                BitVec::from_u64(width, s >> width),
            )
            .unwrap()
        })
    }

    fn random_circuit(width: usize, len: usize, rng: &mut RngStream) -> Circuit {
        let mut c = Circuit::new(width);
        for _ in 0..len {
            let op = match rng.gen_range(0..6) {
                0 => GateOp::X(rng.gen_range(0..width)),
                1 => GateOp::Z(rng.gen_range(0..width)),
                2 => GateOp::H(rng.gen_range(0..width)),
                3 if width >= 2 => {
                    let a = rng.gen_range(0..width);
                    GateOp::cnot(a, (a + rng.gen_range(1..width)) % width)
                }
                4 if width >= 3 => GateOp::toffoli(0, 1, 2),
                _ => GateOp::perm(PermSpec::random_table(width, rng), 0),
            };
            c.push(op).unwrap();
        }
        c
    }

    #[test]
    fn empty_circuit_is_identity() {
        let mut rng = RngStream::new(0, 0);
        let s = QslRegister::prepare_full(rng.bits(4), rng.bits(4)).unwrap();
        let mut r = s.clone();
        r.apply_circuit(&Circuit::new(4)).unwrap();
        assert_eq!(r, s);
    }

    #[test]
    fn hh_is_identity() {
        let c = Circuit::from_ops(1, vec![GateOp::H(0), GateOp::H(0)]).unwrap();
        for s in all_states(1) {
            let mut r = s.clone();
            r.apply_circuit(&c).unwrap();
            assert_eq!(r, s);
        }
    }

    #[test]
    fn circuit_then_reverse_is_identity_exhaustively() {
        let mut rng = RngStream::new(21, 0);
        for width in 1..=3 {
            for _ in 0..20 {
                let c = random_circuit(width, 12, &mut rng);
                let back = c.reverse();
                for s in all_states(width) {
                    let mut r = s.clone();
                    r.apply_circuit(&c).unwrap();
                    r.apply_circuit(&back).unwrap();
                    assert_eq!(r, s);
                }
            }
        }
    }

    #[test]
    fn validation() {
        let mut c = Circuit::new(3);
        assert_eq!(c.push(GateOp::X(3)), Err(QslError::IndexOutOfRange { index: 3, width: 3 }));
        assert_eq!(c.push(GateOp::cnot(1, 1)), Err(QslError::IndexClash(1)));
        assert_eq!(c.push(GateOp::toffoli(0, 2, 2)), Err(QslError::IndexClash(2)));
        assert!(c.push(GateOp::perm(PermSpec::identity(3), 1)).is_err());
        assert!(c.push(GateOp::perm(PermSpec::identity(2), 1)).is_ok());
        let mut r = QslRegister::prepare_full(BitVec::zeros(2), BitVec::zeros(2)).unwrap();
        assert_eq!(
            r.apply_circuit(&c),
            Err(QslError::WidthMismatch { expected: 3, found: 2 })
        );
    }
}
