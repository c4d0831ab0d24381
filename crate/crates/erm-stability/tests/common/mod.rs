//! Independent brute-force oracles for the exact engines.
//!
//! Everything here is implemented from scratch against the scenario's raw
//! data (atom list, weights, label tables): its own ERM, its own
//! discrepancy indicators, and full sequence-space enumeration with integer
//! weight accounting. It deliberately shares no code with the engines or
//! the sample-level ops it validates.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use erm_stability::model::Label;
use erm_stability::scenarios::ScenarioSpec;

/// Raw scenario data with weights as integer numerators over a common
/// denominator, so the enumeration can count in u128.
pub struct OracleScenario {
    /// (x_id, label sign) per atom.
    atoms: Vec<(usize, i8)>,
    /// Weight numerators over `weight_denominator`.
    numerators: Vec<u128>,
    weight_denominator: u128,
    /// labels[h][x] in {-1, +1}.
    labels: Vec<Vec<i8>>,
}

fn sign_of(label: Label) -> i8 {
    label.sign()
}

impl OracleScenario {
    pub fn from_spec(spec: &ScenarioSpec) -> Self {
        let dist = spec.distribution();
        // Common denominator = lcm of the atom weight denominators.
        let mut denominator = BigInt::from(1);
        for (_, w) in dist.atoms() {
            denominator = num_integer::lcm(denominator, w.denom().clone());
        }
        let numerators: Vec<u128> = dist
            .atoms()
            .iter()
            .map(|(_, w)| {
                (w.numer() * &denominator / w.denom())
                    .to_u128()
                    .expect("oracle needs small weight numerators")
            })
            .collect();
        OracleScenario {
            atoms: dist
                .atoms()
                .iter()
                .map(|(e, _)| (e.x_id, sign_of(e.y)))
                .collect(),
            numerators,
            weight_denominator: denominator.to_u128().expect("small denominator"),
            labels: spec
                .space()
                .hypotheses()
                .iter()
                .map(|h| h.labels().iter().map(|l| l.sign()).collect())
                .collect(),
        }
    }

    fn loss(&self, hypothesis: usize, atom: usize) -> u32 {
        let (x, y) = self.atoms[atom];
        (self.labels[hypothesis][x] != y) as u32
    }

    /// First-index argmin of misclassification counts.
    fn erm(&self, sample_atoms: &[usize]) -> usize {
        let mut best = 0usize;
        let mut best_misses = u32::MAX;
        for h in 0..self.labels.len() {
            let misses: u32 = sample_atoms.iter().map(|&a| self.loss(h, a)).sum();
            if misses < best_misses {
                best = h;
                best_misses = misses;
            }
        }
        best
    }
}

/// All four instability probabilities from one full enumeration of the
/// weighted sequences (z_1, ..., z_m, u), with the replacement at
/// `position` (0-based).
pub struct OracleDeltas {
    pub cv: BigRational,
    pub weak: BigRational,
    pub overlap: BigRational,
    /// max(cv, overlap): the reported training δ.
    pub training: BigRational,
}

pub fn oracle_deltas(
    spec: &ScenarioSpec,
    m: u64,
    beta: &BigRational,
    position: usize,
) -> OracleDeltas {
    let oracle = OracleScenario::from_spec(spec);
    let atom_count = oracle.atoms.len();
    assert!(m >= 2 && (position as u64) < m);

    // Smallest integer gap g with g/(m-1) > beta, found by direct search;
    // the overlap indicator compares held-out miss counts against it.
    let mut overlap_gap = m; // sentinel: no representable gap fires
    for g in 0..=(m - 1) {
        if BigRational::new(BigInt::from(g), BigInt::from(m - 1)) > *beta {
            overlap_gap = g;
            break;
        }
    }

    let mut cv_hits: u128 = 0;
    let mut weak_hits: u128 = 0;
    let mut overlap_hits: u128 = 0;

    let mut picks = vec![0usize; m as usize + 1];
    loop {
        let mut weight: u128 = 1;
        for &a in &picks {
            weight *= oracle.numerators[a];
        }
        let sample = &picks[..m as usize];
        let u_atom = picks[m as usize];

        let f_s = oracle.erm(sample);
        let mut replaced = sample.to_vec();
        replaced[position] = u_atom;
        let f_r = oracle.erm(&replaced);

        // CV: the losses on U differ by more than beta (0-1 loss: differ).
        if oracle.loss(f_s, u_atom) != oracle.loss(f_r, u_atom) {
            cv_hits += weight;
        }
        // Weak: the label tables differ anywhere.
        if oracle.labels[f_s] != oracle.labels[f_r] {
            weak_hits += weight;
        }
        // Overlap: held-out miss counts of the two picks differ enough.
        let mut miss_s = 0i64;
        let mut miss_r = 0i64;
        for (slot, &a) in sample.iter().enumerate() {
            if slot != position {
                miss_s += oracle.loss(f_s, a) as i64;
                miss_r += oracle.loss(f_r, a) as i64;
            }
        }
        if (miss_s - miss_r).unsigned_abs() >= overlap_gap as u64 {
            overlap_hits += weight;
        }

        let mut slot = 0usize;
        loop {
            picks[slot] += 1;
            if picks[slot] < atom_count {
                break;
            }
            picks[slot] = 0;
            slot += 1;
            if slot == picks.len() {
                let denominator = oracle.weight_denominator.pow(m as u32 + 1);
                let ratio = |hits: u128| {
                    BigRational::new(BigInt::from(hits), BigInt::from(denominator))
                };
                let cv = ratio(cv_hits);
                let overlap = ratio(overlap_hits);
                let training = if cv >= overlap { cv.clone() } else { overlap.clone() };
                return OracleDeltas {
                    cv,
                    weak: ratio(weak_hits),
                    overlap,
                    training,
                };
            }
        }
    }
}

/// Direct enumeration of Pr(|R_{S^i}(h1) - R_{S^i}(h2)| <= 1/(m-1)) for a
/// synthetic two-minimizer setting with disagreement mass p: every retained
/// example independently favors h1 (mass p/2), favors h2 (mass p/2), or is
/// neutral. Counts sequences over a common denominator.
pub fn oracle_tie_gap(p: &BigRational, m: u64) -> BigRational {
    // Masses over denominator 2q: favor1 = favor2 = p_num * (q / p_den),
    // neutral = 2 (q - ...) with q = lcm(2, p.denom()).
    let two_den: BigInt = p.denom() * BigInt::from(2);
    let favor: BigInt = p.numer().clone();
    let neutral: BigInt = (BigRational::from_integer(1.into()) - p).numer()
        * (&two_den / (BigRational::from_integer(1.into()) - p).denom());
    let favor = favor.to_u128().expect("small");
    let neutral = neutral.to_u128().expect("small");
    let denominator = two_den.to_u128().expect("small");

    fn recurse(remaining: u64, diff: i64, weight: u128, masses: (u128, u128), hits: &mut u128) {
        if remaining == 0 {
            if diff.abs() <= 1 {
                *hits += weight;
            }
            return;
        }
        if masses.0 > 0 {
            recurse(remaining - 1, diff + 1, weight * masses.0, masses, hits);
            recurse(remaining - 1, diff - 1, weight * masses.0, masses, hits);
        }
        if masses.1 > 0 {
            recurse(remaining - 1, diff, weight * masses.1, masses, hits);
        }
    }
    let mut hits = 0u128;
    recurse(m - 1, 0, 1, (favor, neutral), &mut hits);
    BigRational::new(
        BigInt::from(hits),
        BigInt::from(denominator.pow(m as u32 - 1)),
    )
}
