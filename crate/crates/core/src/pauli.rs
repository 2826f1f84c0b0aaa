//! Pauli tensor products in symplectic form.
//!
//! An observable on `n` qubits is stored as `i^phase · X^x · Z^z`, where `x`
//! and `z` are `n`-bit masks. Qubit 1 is the most significant bit, so mask
//! bits line up with the computational basis index `4·b1 + 2·b2 + b3`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ExactMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl TryFrom<char> for PauliLetter {
    type Error = Error;

    fn try_from(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'I' => Ok(PauliLetter::I),
            'X' => Ok(PauliLetter::X),
            'Y' => Ok(PauliLetter::Y),
            'Z' => Ok(PauliLetter::Z),
            other => Err(Error::InvalidLetter(other)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliObservable {
    n_qubits: usize,
    x_mask: u32,
    z_mask: u32,
    phase_exp: u8,
}

impl PauliObservable {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits > 0 && n_qubits <= 16, "unsupported qubit count {n_qubits}");
        PauliObservable { n_qubits, x_mask: 0, z_mask: 0, phase_exp: 0 }
    }

    /// Builds the literal tensor product of `letters`, qubit 1 first.
    pub fn from_letters(letters: &[PauliLetter]) -> Self {
        let n = letters.len();
        let mut p = Self::identity(n);
        for (q, letter) in letters.iter().enumerate() {
            let bit = 1u32 << (n - 1 - q);
            match letter {
                PauliLetter::I => {}
                PauliLetter::X => p.x_mask |= bit,
                PauliLetter::Z => p.z_mask |= bit,
                // Y = i·X·Z
                PauliLetter::Y => {
                    p.x_mask |= bit;
                    p.z_mask |= bit;
                    p.phase_exp = (p.phase_exp + 1) % 4;
                }
            }
        }
        p
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u32 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u32 {
        self.z_mask
    }

    pub fn phase_exp(&self) -> u8 {
        self.phase_exp
    }

    pub fn dimension(&self) -> usize {
        1 << self.n_qubits
    }

    /// True for `±I`; the sign is carried by the phase.
    pub fn is_scalar(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    pub fn is_identity(&self) -> bool {
        self.is_scalar() && self.phase_exp == 0
    }

    pub fn is_hermitian(&self) -> bool {
        let y_count = (self.x_mask & self.z_mask).count_ones() as u8;
        (self.phase_exp + 4 - y_count % 4).is_multiple_of(2)
    }

    /// `+1` or `-1` for a scalar observable (`±I`), `None` otherwise.
    pub fn scalar_sign(&self) -> Option<i8> {
        if !self.is_scalar() {
            return None;
        }
        match self.phase_exp {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    fn check_qubits(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitMismatch { left: self.n_qubits, right: other.n_qubits });
        }
        Ok(())
    }

    /// Operator product `self · other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_qubits(other)?;
        // X^x1 Z^z1 X^x2 Z^z2 = (-1)^{|z1 & x2|} X^(x1^x2) Z^(z1^z2)
        let swap_sign = 2 * (self.z_mask & other.x_mask).count_ones();
        Ok(PauliObservable {
            n_qubits: self.n_qubits,
            x_mask: self.x_mask ^ other.x_mask,
            z_mask: self.z_mask ^ other.z_mask,
            phase_exp: ((self.phase_exp as u32 + other.phase_exp as u32 + swap_sign) % 4) as u8,
        })
    }

    /// Product of a nonempty sequence, left to right.
    pub fn product<'a, I>(items: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a PauliObservable>,
    {
        let mut iter = items.into_iter();
        let first = *iter.next().expect("product of an empty sequence");
        iter.try_fold(first, |acc, p| acc.multiply(p))
    }

    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_qubits(other)?;
        let form = (self.x_mask & other.z_mask).count_ones() + (self.z_mask & other.x_mask).count_ones();
        Ok(form.is_multiple_of(2))
    }

    /// Real integer realization. `X^x Z^z` is always real, so only an odd
    /// phase exponent (an odd number of `σ_y` factors, say) is rejected.
    pub fn to_matrix(&self) -> Result<ExactMatrix> {
        if self.phase_exp % 2 == 1 {
            return Err(Error::ComplexRealization);
        }
        let dim = self.dimension();
        let sign = if self.phase_exp == 2 { -1 } else { 1 };
        let mut entries = vec![0i64; dim * dim];
        for col in 0..dim {
            let row = col ^ self.x_mask as usize;
            let parity = (self.z_mask as usize & col).count_ones() % 2;
            entries[row * dim + col] = if parity == 1 { -sign } else { sign };
        }
        Ok(ExactMatrix::from_integers(dim, entries))
    }

    pub fn letters(&self) -> Vec<PauliLetter> {
        (0..self.n_qubits)
            .map(|q| {
                let bit = 1u32 << (self.n_qubits - 1 - q);
                match (self.x_mask & bit != 0, self.z_mask & bit != 0) {
                    (false, false) => PauliLetter::I,
                    (true, false) => PauliLetter::X,
                    (false, true) => PauliLetter::Z,
                    (true, true) => PauliLetter::Y,
                }
            })
            .collect()
    }
}

impl FromStr for PauliObservable {
    type Err = Error;

    /// Parses a letter string such as `"XXZ"`, qubit 1 first.
    fn from_str(s: &str) -> Result<Self> {
        let letters = s.chars().map(PauliLetter::try_from).collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(Error::InvalidSystem("empty Pauli string".into()));
        }
        Ok(Self::from_letters(&letters))
    }
}

impl fmt::Display for PauliObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // phase relative to the plain letter product, which absorbs one i per Y
        let y_count = (self.x_mask & self.z_mask).count_ones() as u8;
        let rel = (self.phase_exp + 4 - y_count % 4) % 4;
        let prefix = ["", "i", "-", "-i"][rel as usize];
        write!(f, "{prefix}")?;
        for l in self.letters() {
            let c = match l {
                PauliLetter::I => 'I',
                PauliLetter::X => 'X',
                PauliLetter::Y => 'Y',
                PauliLetter::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}
