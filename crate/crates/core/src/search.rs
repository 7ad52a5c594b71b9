//! Budgets and deterministic candidate enumeration shared by every search.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strata_linalg::{Field, Scalar};

pub const DEFAULT_BUDGET: u64 = 1_000_000;
/// Upper bound on seeded random candidates when enumeration is out of reach.
pub const RANDOM_TRIES: u64 = 1_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub budget: u64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: DEFAULT_BUDGET,
            seed: 0,
        }
    }
}

/// Number of projective points of `F_p^q`, if it fits in a `u64`.
pub fn projective_point_count(p: u64, q: usize) -> Option<u64> {
    let mut total: u64 = 0;
    let mut pow: u64 = 1;
    for _ in 0..q {
        total = total.checked_add(pow)?;
        pow = pow.checked_mul(p)?;
    }
    Some(total)
}

/// Coefficient vectors to try, with a flag telling whether they exhaust
/// every line of `field^q`.
pub struct Candidates {
    pub exhaustive: bool,
    iter: Box<dyn Iterator<Item = Vec<Scalar>>>,
}

impl Iterator for Candidates {
    type Item = Vec<Scalar>;
    fn next(&mut self) -> Option<Vec<Scalar>> {
        self.iter.next()
    }
}

/// All projective points in lexicographic order when there are at most
/// `cfg.budget` of them, otherwise seeded random vectors.
pub fn candidates(field: Field, q: usize, cfg: &SearchConfig) -> Candidates {
    if q == 0 {
        return Candidates {
            exhaustive: true,
            iter: Box::new(std::iter::empty()),
        };
    }
    if let Some(p) = field.order() {
        if projective_point_count(p, q).is_some_and(|n| n <= cfg.budget) {
            return Candidates {
                exhaustive: true,
                iter: Box::new(ProjectivePoints::new(field, p, q)),
            };
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let tries = cfg.budget.min(RANDOM_TRIES);
    let iter = (0..tries).map(move |_| random_vector(field, q, &mut rng));
    Candidates {
        exhaustive: false,
        iter: Box::new(iter),
    }
}

pub fn random_vector(field: Field, q: usize, rng: &mut ChaCha8Rng) -> Vec<Scalar> {
    match field.order() {
        Some(p) => (0..q).map(|_| field.element(rng.gen_range(0..p))).collect(),
        None => (0..q).map(|_| field.from_i64(rng.gen_range(-50..=50))).collect(),
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Vectors whose first nonzero coordinate is 1, lexicographically.
struct ProjectivePoints {
    field: Field,
    p: u64,
    q: usize,
    lead: usize,
    tail: Vec<u64>,
    done: bool,
}

impl ProjectivePoints {
    fn new(field: Field, p: u64, q: usize) -> Self {
        ProjectivePoints {
            field,
            p,
            q,
            lead: 0,
            tail: vec![0; q - 1],
            done: false,
        }
    }
}

impl Iterator for ProjectivePoints {
    type Item = Vec<Scalar>;
    fn next(&mut self) -> Option<Vec<Scalar>> {
        if self.done {
            return None;
        }
        let f = self.field;
        let mut v = vec![f.zero(); self.q];
        v[self.lead] = f.one();
        let free = self.q - 1 - self.lead;
        for k in 0..free {
            v[self.lead + 1 + k] = f.element(self.tail[k]);
        }
        // Advance the tail odometer (last coordinate fastest).
        let mut k = free;
        loop {
            if k == 0 {
                self.lead += 1;
                if self.lead == self.q {
                    self.done = true;
                }
                self.tail.iter_mut().for_each(|x| *x = 0);
                break;
            }
            k -= 1;
            self.tail[k] += 1;
            if self.tail[k] < self.p {
                break;
            }
            self.tail[k] = 0;
        }
        Some(v)
    }
}
