use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::N_LANGUAGES;
use crate::error::{Error, Result};
use crate::eval::OUT_OF_SET;

/// Largest differing-sample count accepted by exhaustive enumeration.
pub const MAX_EXHAUSTIVE: usize = 25;
/// Automatic mode enumerates exactly up to this many swap patterns.
pub const AUTO_EXHAUSTIVE_PATTERNS: u64 = 1 << 12;

/// Two systems' predictions on the same gold-labelled samples. Labels are
/// registry indices, with [`OUT_OF_SET`] for anything else.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedOutcomes {
    gold: Vec<usize>,
    pred_a: Vec<usize>,
    pred_b: Vec<usize>,
}

impl PairedOutcomes {
    pub fn new(gold: Vec<usize>, pred_a: Vec<usize>, pred_b: Vec<usize>) -> Result<Self> {
        if gold.len() != pred_a.len() || gold.len() != pred_b.len() {
            return Err(Error::Data(format!(
                "paired outcomes need equal lengths, got {}, {} and {}",
                gold.len(),
                pred_a.len(),
                pred_b.len()
            )));
        }
        if gold.iter().any(|&g| g >= N_LANGUAGES)
            || pred_a.iter().chain(&pred_b).any(|&p| p > OUT_OF_SET)
        {
            return Err(Error::Usage("label index out of range".into()));
        }
        Ok(Self {
            gold,
            pred_a,
            pred_b,
        })
    }

    pub fn len(&self) -> usize {
        self.gold.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gold.is_empty()
    }

    pub fn swapped(&self) -> Self {
        Self {
            gold: self.gold.clone(),
            pred_a: self.pred_b.clone(),
            pred_b: self.pred_a.clone(),
        }
    }

    /// Number of samples on which the two systems disagree.
    pub fn n_differing(&self) -> usize {
        self.pred_a
            .iter()
            .zip(&self.pred_b)
            .filter(|(a, b)| a != b)
            .count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistic {
    Accuracy,
    /// F1 of one language, by registry index.
    LanguageF1(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PermutationMode {
    /// Exhaustive up to [`AUTO_EXHAUSTIVE_PATTERNS`], otherwise Monte Carlo
    /// with the given resample count.
    Auto(u64),
    Exhaustive,
    MonteCarlo(u64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PermutationResult {
    /// `|S(A) - S(B)|` on the unswapped data.
    pub observed: f64,
    pub p_value: f64,
    /// Patterns enumerated or resamples drawn.
    pub resamples: u64,
    pub exhaustive: bool,
}

/// Counts contributed by one sample to a per-system score.
#[derive(Debug, Clone, Copy, Default)]
struct Counts {
    tp: i64,
    fp: i64,
    fn_: i64,
}

impl Counts {
    fn of(stat: Statistic, gold: usize, pred: usize) -> Self {
        match stat {
            Statistic::Accuracy => Counts {
                tp: (gold == pred) as i64,
                ..Counts::default()
            },
            Statistic::LanguageF1(l) => Counts {
                tp: (gold == l && pred == l) as i64,
                fp: (gold != l && pred == l) as i64,
                fn_: (gold == l && pred != l) as i64,
            },
        }
    }

    fn add(self, o: Counts) -> Counts {
        Counts {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
        }
    }

    fn score(self, stat: Statistic, n: usize) -> f64 {
        match stat {
            Statistic::Accuracy => self.tp as f64 / n as f64,
            Statistic::LanguageF1(_) => {
                let den = 2 * self.tp + self.fp + self.fn_;
                if self.tp == 0 {
                    0.0
                } else {
                    (2 * self.tp) as f64 / den as f64
                }
            }
        }
    }
}

struct Prepared {
    stat: Statistic,
    n: usize,
    base: Counts,
    /// Per differing sample: contributions as (A, B) in the unswapped order.
    diffs: Vec<(Counts, Counts)>,
}

impl Prepared {
    fn new(o: &PairedOutcomes, stat: Statistic) -> Self {
        let mut base = Counts::default();
        let mut diffs = Vec::new();
        for ((&g, &a), &b) in o.gold.iter().zip(&o.pred_a).zip(&o.pred_b) {
            if a == b {
                base = base.add(Counts::of(stat, g, a));
            } else {
                diffs.push((Counts::of(stat, g, a), Counts::of(stat, g, b)));
            }
        }
        Self {
            stat,
            n: o.len(),
            base,
            diffs,
        }
    }

    /// `|S(A) - S(B)|` with sample `i` swapped when `swap(i)` holds.
    fn stat_with(&self, swap: impl Fn(usize) -> bool) -> f64 {
        let (mut a, mut b) = (self.base, self.base);
        for (i, &(ca, cb)) in self.diffs.iter().enumerate() {
            if swap(i) {
                a = a.add(cb);
                b = b.add(ca);
            } else {
                a = a.add(ca);
                b = b.add(cb);
            }
        }
        (a.score(self.stat, self.n) - b.score(self.stat, self.n)).abs()
    }
}

/// Resample statistics at least this close below the observed value count
/// as ties, absorbing rounding in recomputed F1 values.
const TIE_TOLERANCE: f64 = 1e-12;

/// Paired permutation test of `|S(A) - S(B)|` under random per-sample swaps
/// of the two systems' predictions.
///
/// Monte Carlo p-values use add-one smoothing; resample `k` draws its swaps
/// from a generator keyed by `(seed, k)`.
pub fn paired_permutation_test(
    outcomes: &PairedOutcomes,
    stat: Statistic,
    mode: PermutationMode,
    seed: u64,
) -> Result<PermutationResult> {
    if let Statistic::LanguageF1(l) = stat {
        if l >= N_LANGUAGES {
            return Err(Error::Usage(format!("language index {l} out of range")));
        }
    }
    if outcomes.is_empty() {
        return Err(Error::Data(
            "permutation test needs at least one sample".into(),
        ));
    }
    let prep = Prepared::new(outcomes, stat);
    let d = prep.diffs.len();
    let observed = prep.stat_with(|_| false);
    let threshold = observed - TIE_TOLERANCE;
    let exhaustive = match mode {
        PermutationMode::Exhaustive => true,
        PermutationMode::MonteCarlo(_) => false,
        PermutationMode::Auto(_) => d < 64 && (1u64 << d) <= AUTO_EXHAUSTIVE_PATTERNS,
    };
    if exhaustive {
        if d > MAX_EXHAUSTIVE {
            return Err(Error::Resource(format!(
                "{d} differing samples need 2^{d} patterns; exhaustive mode stops at {MAX_EXHAUSTIVE}, use Monte Carlo"
            )));
        }
        let patterns = 1u64 << d;
        let hits = (0..patterns)
            .filter(|&m| prep.stat_with(|i| m >> i & 1 == 1) >= threshold)
            .count() as u64;
        return Ok(PermutationResult {
            observed,
            p_value: hits as f64 / patterns as f64,
            resamples: patterns,
            exhaustive: true,
        });
    }
    let resamples = match mode {
        PermutationMode::Auto(r) | PermutationMode::MonteCarlo(r) => r,
        PermutationMode::Exhaustive => unreachable!(),
    };
    if resamples == 0 {
        return Err(Error::Config(
            "Monte Carlo permutation test needs at least one resample".into(),
        ));
    }
    let mut bits = vec![0u64; d.div_ceil(64)];
    let mut hits = 0u64;
    for k in 0..resamples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k);
        for w in bits.iter_mut() {
            *w = rng.next_u64();
        }
        if prep.stat_with(|i| bits[i / 64] >> (i % 64) & 1 == 1) >= threshold {
            hits += 1;
        }
    }
    Ok(PermutationResult {
        observed,
        p_value: (1 + hits) as f64 / (1 + resamples) as f64,
        resamples,
        exhaustive: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> PairedOutcomes {
        // A right on samples 0..3, B right on sample 0 only.
        PairedOutcomes::new(vec![0, 1, 2, 3], vec![0, 1, 2, 5], vec![0, 4, 4, 5]).unwrap()
    }

    #[test]
    fn identical_systems_give_one() {
        let o = PairedOutcomes::new(vec![0, 1, 2], vec![0, 2, 2], vec![0, 2, 2]).unwrap();
        for mode in [
            PermutationMode::Exhaustive,
            PermutationMode::MonteCarlo(500),
        ] {
            let r = paired_permutation_test(&o, Statistic::Accuracy, mode, 3).unwrap();
            assert_eq!(r.p_value, 1.0);
            assert_eq!(r.observed, 0.0);
        }
    }

    #[test]
    fn four_sample_toy_by_hand() {
        // Two differing samples, each worth +1/4 to A; patterns give
        // |diff| = 1/2, 0, 0, 1/2, so p = 2/4.
        let r =
            paired_permutation_test(&toy(), Statistic::Accuracy, PermutationMode::Exhaustive, 0)
                .unwrap();
        assert_eq!(r.observed, 0.5);
        assert_eq!(r.p_value, 0.5);
        assert_eq!(r.resamples, 4);
        let mc = paired_permutation_test(
            &toy(),
            Statistic::Accuracy,
            PermutationMode::MonteCarlo(100_000),
            9,
        )
        .unwrap();
        assert!((mc.p_value - 0.5).abs() < 3.0 * (0.25f64 / 1e5).sqrt());
    }

    #[test]
    fn role_symmetry_and_resource_limit() {
        let o = toy();
        for stat in [Statistic::Accuracy, Statistic::LanguageF1(1)] {
            let a =
                paired_permutation_test(&o, stat, PermutationMode::MonteCarlo(2000), 5).unwrap();
            let b =
                paired_permutation_test(&o.swapped(), stat, PermutationMode::MonteCarlo(2000), 5)
                    .unwrap();
            assert_eq!(a, b);
        }
        let gold = vec![0; 30];
        let big = PairedOutcomes::new(gold.clone(), gold.clone(), vec![1; 30]).unwrap();
        assert!(matches!(
            paired_permutation_test(&big, Statistic::Accuracy, PermutationMode::Exhaustive, 0),
            Err(Error::Resource(_))
        ));
        let auto =
            paired_permutation_test(&big, Statistic::Accuracy, PermutationMode::Auto(999), 0)
                .unwrap();
        assert!(!auto.exhaustive);
        assert_eq!(auto.resamples, 999);
    }
}
