//! Gate payloads and the sources that assign them to parameter-sharing classes.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::circuit::ClassId;
use crate::error::{DmeraError, Result};
use crate::fermi::FermionTemplate;

pub type C64 = Complex64;

/// Two-qubit unitary. Row/column index is `2*b0 + b1` where `b0` is the bit of
/// the first support qubit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Unitary4(pub [[C64; 4]; 4]);

impl Unitary4 {
    pub fn identity() -> Self {
        let mut m = [[C64::new(0.0, 0.0); 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = C64::new(1.0, 0.0);
        }
        Unitary4(m)
    }

    /// Haar-distributed sample: Gram-Schmidt on a complex Ginibre matrix.
    pub fn haar_random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut cols = [[C64::new(0.0, 0.0); 4]; 4];
        for col in cols.iter_mut() {
            for z in col.iter_mut() {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                *z = C64::new(re, im);
            }
        }
        for j in 0..4 {
            for k in 0..j {
                let proj: C64 = (0..4).map(|i| cols[k][i].conj() * cols[j][i]).sum();
                for i in 0..4 {
                    let v = cols[k][i];
                    cols[j][i] -= proj * v;
                }
            }
            let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in cols[j].iter_mut() {
                *z /= norm;
            }
        }
        let mut m = [[C64::new(0.0, 0.0); 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                *z = cols[j][i];
            }
        }
        Unitary4(m)
    }

    pub fn dagger(&self) -> Self {
        let mut m = [[C64::new(0.0, 0.0); 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                *z = self.0[j][i].conj();
            }
        }
        Unitary4(m)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut m = [[C64::new(0.0, 0.0); 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                *z = (0..4).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        Unitary4(m)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let p = self.dagger().mul(self);
        (0..4).all(|i| {
            (0..4).all(|j| {
                let want = if i == j { 1.0 } else { 0.0 };
                (p.0[i][j] - C64::new(want, 0.0)).norm() <= tol
            })
        })
    }
}

/// What a gate does. Gates in one class share a payload.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum Payload {
    Unitary(Unitary4),
    RandomClifford,
    Fermionic(FermionTemplate),
}

/// Supplies a payload per class. Classes are requested in ascending order,
/// exactly once each.
pub trait PayloadSource {
    fn payload_for(&mut self, class: &ClassId) -> Result<Payload>;
}

impl PayloadSource for BTreeMap<ClassId, Payload> {
    fn payload_for(&mut self, class: &ClassId) -> Result<Payload> {
        self.get(class)
            .cloned()
            .ok_or_else(|| DmeraError::MissingPayload(class.to_string()))
    }
}

/// Haar-random two-qubit unitaries drawn from a ChaCha stream.
#[derive(Clone, Debug)]
pub struct SeededUnitaries {
    rng: ChaCha8Rng,
}

impl SeededUnitaries {
    pub fn new(seed: u64) -> Self {
        SeededUnitaries {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl PayloadSource for SeededUnitaries {
    fn payload_for(&mut self, _class: &ClassId) -> Result<Payload> {
        Ok(Payload::Unitary(Unitary4::haar_random(&mut self.rng)))
    }
}

/// Tags every class as a random Clifford (template Monte Carlo only).
#[derive(Clone, Copy, Debug, Default)]
pub struct CliffordTags;

impl PayloadSource for CliffordTags {
    fn payload_for(&mut self, _class: &ClassId) -> Result<Payload> {
        Ok(Payload::RandomClifford)
    }
}
