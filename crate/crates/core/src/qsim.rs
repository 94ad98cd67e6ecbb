//! Dense statevector simulator.
//!
//! Qubit 0 is the least significant bit of a basis index. Registers are given
//! as qubit lists, first entry least significant. Oracles are applied by
//! iterating over basis indices with a classical callback: a phase flip or a
//! rotation angle is computed per index, which keeps every operation exactly
//! unitary without synthesising reversible circuits.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported register (2^24 amplitudes).
pub const MAX_QUBITS: usize = 24;

const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

/// Gate kinds understood by [`StateVector::apply_gate`].
///
/// Register-valued callbacks receive the value of the register formed by the
/// gate's targets (or, for [`Gate::ConditionalRy`], by the targets after the
/// first one).
#[derive(Clone, Copy)]
pub enum Gate<'a> {
    H,
    X,
    Ry(f64),
    /// `diag(1, e^{i phi})`
    Phase(f64),
    /// `|x> -> (-1)^{f(x)} |x>` on the target register.
    PhaseFlipIf(&'a dyn Fn(usize) -> bool),
    /// `Ry(angle(x))` on `targets[0]`, where `x` is the value of the register
    /// `targets[1..]`.
    ConditionalRy(&'a dyn Fn(usize) -> f64),
}

impl core::fmt::Debug for Gate<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Gate::H => write!(f, "H"),
            Gate::X => write!(f, "X"),
            Gate::Ry(t) => write!(f, "Ry({t})"),
            Gate::Phase(t) => write!(f, "Phase({t})"),
            Gate::PhaseFlipIf(_) => write!(f, "PhaseFlipIf(..)"),
            Gate::ConditionalRy(_) => write!(f, "ConditionalRy(..)"),
        }
    }
}

fn ry_matrix(theta: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (libm::sin(theta / 2.0), libm::cos(theta / 2.0));
    [[Complex64::new(c, 0.0), Complex64::new(-s, 0.0)], [Complex64::new(s, 0.0), Complex64::new(c, 0.0)]]
}

/// Bit offsets of each register value, so `offsets[v]` is the basis-index
/// contribution of register value `v`.
fn register_offsets(register: &[usize]) -> Vec<usize> {
    let mut offsets = vec![0usize; 1 << register.len()];
    for (v, off) in offsets.iter_mut().enumerate() {
        for (bit, &q) in register.iter().enumerate() {
            if v >> bit & 1 == 1 {
                *off |= 1 << q;
            }
        }
    }
    offsets
}

/// Value of `register` inside basis index `index`.
fn register_value(index: usize, register: &[usize]) -> usize {
    register.iter().enumerate().fold(0, |acc, (bit, &q)| acc | ((index >> q & 1) << bit))
}

fn mask_of(qubits: &[usize]) -> usize {
    qubits.iter().fold(0, |m, &q| m | 1 << q)
}

impl StateVector {
    /// `|0...0>` on `n_qubits` qubits.
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits { needed: n_qubits, cap: MAX_QUBITS });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::BadAmplitudeLength(len));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits { needed: n_qubits, cap: MAX_QUBITS });
        }
        let s = StateVector { n_qubits, amps };
        let norm = s.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalised(norm));
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubits(&self, qubits: &[usize]) -> Result<()> {
        let mut seen = 0usize;
        for &q in qubits {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, n_qubits: self.n_qubits });
            }
            if seen >> q & 1 == 1 {
                return Err(Error::RepeatedQubit(q));
            }
            seen |= 1 << q;
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &Gate<'_>, targets: &[usize]) -> Result<()> {
        self.apply_controlled(gate, targets, &[])
    }

    /// Applies `gate` on the subspace where every qubit in `controls` is 1.
    pub fn apply_controlled(&mut self, gate: &Gate<'_>, targets: &[usize], controls: &[usize]) -> Result<()> {
        self.apply_impl(gate, targets, controls, false)
    }

    /// Applies the adjoint of `gate`.
    pub fn apply_inverse(&mut self, gate: &Gate<'_>, targets: &[usize], controls: &[usize]) -> Result<()> {
        self.apply_impl(gate, targets, controls, true)
    }

    fn apply_impl(&mut self, gate: &Gate<'_>, targets: &[usize], controls: &[usize], inverse: bool) -> Result<()> {
        let mut all = targets.to_vec();
        all.extend_from_slice(controls);
        self.check_qubits(&all)?;
        let cmask = mask_of(controls);
        let sign = if inverse { -1.0 } else { 1.0 };
        match *gate {
            Gate::H => {
                let h = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
                for &t in targets {
                    self.single(t, cmask, [[h, h], [h, -h]]);
                }
            }
            Gate::X => {
                let (z, o) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
                for &t in targets {
                    self.single(t, cmask, [[z, o], [o, z]]);
                }
            }
            Gate::Ry(theta) => {
                for &t in targets {
                    self.single(t, cmask, ry_matrix(sign * theta));
                }
            }
            Gate::Phase(phi) => {
                let ph = Complex64::from_polar(1.0, sign * phi);
                for &t in targets {
                    let m = cmask | 1 << t;
                    self.amps.iter_mut().enumerate().filter(|(i, _)| i & m == m).for_each(|(_, a)| *a *= ph);
                }
            }
            Gate::PhaseFlipIf(pred) => {
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & cmask == cmask && pred(register_value(i, targets)) {
                        *a = -*a;
                    }
                }
            }
            Gate::ConditionalRy(angle) => {
                let (&t, reg) = targets.split_first().ok_or(Error::QubitOutOfRange { qubit: 0, n_qubits: 0 })?;
                let bit = 1 << t;
                for i in 0..self.amps.len() {
                    if i & bit != 0 || i & cmask != cmask {
                        continue;
                    }
                    let theta = sign * angle(register_value(i, reg));
                    let (s, c) = (libm::sin(theta / 2.0), libm::cos(theta / 2.0));
                    let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                    self.amps[i] = a0 * c - a1 * s;
                    self.amps[i | bit] = a0 * s + a1 * c;
                }
            }
        }
        Ok(())
    }

    fn single(&mut self, target: usize, cmask: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1 << target;
        for i in 0..self.amps.len() {
            if i & bit != 0 || i & cmask != cmask {
                continue;
            }
            let (a0, a1) = (self.amps[i], self.amps[i | bit]);
            self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    /// Grover diffusion `2|s><s| - I` on `over`: for every assignment of the
    /// remaining qubits, amplitudes are reflected about their mean.
    pub fn diffusion(&mut self, over: &[usize]) -> Result<()> {
        self.check_qubits(over)?;
        let offsets = register_offsets(over);
        let rmask = mask_of(over);
        let dim = offsets.len() as f64;
        for base in 0..self.amps.len() {
            if base & rmask != 0 {
                continue;
            }
            let mean = offsets.iter().map(|&o| self.amps[base | o]).sum::<Complex64>() / dim;
            for &o in &offsets {
                let a = &mut self.amps[base | o];
                *a = mean * 2.0 - *a;
            }
        }
        Ok(())
    }

    /// Probability that measuring `qubit` yields `outcome`.
    pub fn probability_of(&self, qubit: usize, outcome: bool) -> Result<f64> {
        self.check_qubits(&[qubit])?;
        let bit = 1 << qubit;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i & bit != 0) == outcome)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Basis-state probabilities.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Marginal outcome distribution of `register`.
    pub fn register_distribution(&self, register: &[usize]) -> Result<Vec<f64>> {
        self.check_qubits(register)?;
        let mut dist = vec![0.0; 1 << register.len()];
        for (i, a) in self.amps.iter().enumerate() {
            dist[register_value(i, register)] += a.norm_sqr();
        }
        Ok(dist)
    }

    fn controlled_phase(&mut self, control: usize, target: usize, phi: f64) {
        let m = 1 << control | 1 << target;
        let ph = Complex64::from_polar(1.0, phi);
        self.amps.iter_mut().enumerate().filter(|(i, _)| i & m == m).for_each(|(_, a)| *a *= ph);
    }

    fn swap(&mut self, a: usize, b: usize) {
        let (ba, bb) = (1 << a, 1 << b);
        for i in 0..self.amps.len() {
            if i & ba != 0 && i & bb == 0 {
                self.amps.swap(i, i ^ ba ^ bb);
            }
        }
    }

    /// `|x> -> 2^{-m/2} sum_y e^{2 pi i x y / 2^m} |y>` on `register`.
    pub fn qft(&mut self, register: &[usize]) -> Result<()> {
        self.check_qubits(register)?;
        let m = register.len();
        for j in (0..m).rev() {
            self.apply_gate(&Gate::H, &[register[j]])?;
            for k in (0..j).rev() {
                self.controlled_phase(register[k], register[j], PI / (1u64 << (j - k)) as f64);
            }
        }
        for i in 0..m / 2 {
            self.swap(register[i], register[m - 1 - i]);
        }
        Ok(())
    }

    /// Inverse of [`StateVector::qft`]: the gate sequence reversed with
    /// conjugated phases.
    pub fn inverse_qft(&mut self, register: &[usize]) -> Result<()> {
        self.check_qubits(register)?;
        let m = register.len();
        for i in 0..m / 2 {
            self.swap(register[i], register[m - 1 - i]);
        }
        for j in 0..m {
            for k in 0..j {
                self.controlled_phase(register[k], register[j], -PI / (1u64 << (j - k)) as f64);
            }
            self.apply_gate(&Gate::H, &[register[j]])?;
        }
        Ok(())
    }
}

/// `|0...0>` on `n_qubits` qubits.
pub fn init_state(n_qubits: usize) -> Result<StateVector> {
    StateVector::new(n_qubits)
}
