//! Dense Fock-space reference, built directly on occupation bitstrings with
//! no Pauli algebra. Position p of the ordering is bit p of the basis index;
//! a_p |s> = (-1)^(occupied positions below p) |s - e_p>.

#![allow(dead_code)]

use dmera_core::fermi::FermionTemplate;
use dmera_core::{FermionKind, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub dim: usize,
    pub data: Vec<C64>,
}

impl Dense {
    pub fn zeros(dim: usize) -> Self {
        Dense { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn at(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim + c]
    }

    pub fn mul(&self, o: &Dense) -> Dense {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * o.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Dense) -> Dense {
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect();
        Dense { dim: self.dim, data }
    }

    pub fn scale(&self, s: C64) -> Dense {
        Dense { dim: self.dim, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn dagger(&self) -> Dense {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    fn norm1(&self) -> f64 {
        (0..self.dim)
            .map(|c| (0..self.dim).map(|r| self.at(r, c).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// exp(self) by scaling and squaring a Taylor series.
    pub fn expm(&self) -> Dense {
        let mut squarings = 0;
        let mut norm = self.norm1();
        while norm > 0.25 {
            norm /= 2.0;
            squarings += 1;
        }
        let a = self.scale(C64::new(0.5f64.powi(squarings), 0.0));
        let mut term = Dense::identity(self.dim);
        let mut sum = term.clone();
        for k in 1..=24 {
            term = term.mul(&a).scale(C64::new(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
        }
        for _ in 0..squarings {
            sum = sum.mul(&sum);
        }
        sum
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.at(r, c) * v[c]).sum())
            .collect()
    }

    pub fn max_abs_diff(&self, o: &Dense) -> f64 {
        self.data.iter().zip(&o.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Fock space over `modes` positions.
pub struct Fock {
    pub modes: usize,
}

impl Fock {
    pub fn new(modes: usize) -> Self {
        Fock { modes }
    }

    pub fn dim(&self) -> usize {
        1 << self.modes
    }

    pub fn annihilate(&self, p: usize) -> Dense {
        let mut m = Dense::zeros(self.dim());
        for s in 0..self.dim() {
            if s >> p & 1 == 1 {
                let sign = if (s & ((1 << p) - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                let t = s ^ (1 << p);
                m.data[t * self.dim() + s] = C64::new(sign, 0.0);
            }
        }
        m
    }

    pub fn create(&self, p: usize) -> Dense {
        self.annihilate(p).dagger()
    }

    pub fn number(&self, p: usize) -> Dense {
        self.create(p).mul(&self.annihilate(p))
    }

    /// Hermitian generator of a gate acting on positions (i, j).
    pub fn generator(&self, t: &FermionTemplate, i: usize, j: usize) -> Dense {
        let phase = C64::from_polar(1.0, t.phi);
        let op = match t.kind {
            FermionKind::Hop => self.create(i).mul(&self.annihilate(j)),
            FermionKind::Pair => self.create(i).mul(&self.create(j)),
            FermionKind::Density => return self.number(i).mul(&self.number(j)),
        };
        let op = op.scale(phase);
        op.add(&op.dagger())
    }

    /// exp(i theta G).
    pub fn gate(&self, t: &FermionTemplate, i: usize, j: usize) -> Dense {
        self.generator(t, i, j).scale(C64::new(0.0, t.theta)).expm()
    }

    pub fn vacuum(&self) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); self.dim()];
        v[0] = C64::new(1.0, 0.0);
        v
    }

    /// Parity operator (-1)^N.
    pub fn parity(&self) -> Dense {
        let mut m = Dense::zeros(self.dim());
        for s in 0..self.dim() {
            let sign = if s.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            m.data[s * self.dim() + s] = C64::new(sign, 0.0);
        }
        m
    }
}

pub fn expect(op: &Dense, v: &[C64]) -> C64 {
    let w = op.apply(v);
    v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum()
}

pub fn expect_rho(op: &Dense, rho: &Dense) -> C64 {
    let m = op.mul(rho);
    (0..m.dim).map(|i| m.at(i, i)).sum()
}

pub fn outer(v: &[C64]) -> Dense {
    let n = v.len();
    let mut m = Dense::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m.data[i * n + j] = v[i] * v[j].conj();
        }
    }
    m
}
