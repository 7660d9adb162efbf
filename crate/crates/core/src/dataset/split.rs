//! Balanced training selection and speaker-disjoint evaluation splits.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::manifest::{Gender, Manifest, SampleRecord, Split};
use super::registry::{language_registry, N_LANGUAGES};
use crate::dsp::{DEFAULT_MAX_DURATION_S, DEFAULT_MIN_DURATION_S};
use crate::error::{Error, Result};

pub const DEFAULT_TRAIN_PER_LANGUAGE: usize = 4000;
pub const DEFAULT_EVAL_PER_LANGUAGE: usize = 500;

fn in_gate(r: &SampleRecord) -> bool {
    (DEFAULT_MIN_DURATION_S..=DEFAULT_MAX_DURATION_S).contains(&r.duration_s)
}

fn language_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Marks exactly `per_language` records per language as training data: a
/// seeded shuffle of each language's eligible records, then a prefix.
///
/// Eligible means not already in valid/test, inside the 3-7 s gate, and not
/// by a speaker who occurs in valid/test. Every other record outside
/// valid/test is reset to unassigned.
pub fn select_training(manifest: &Manifest, per_language: usize, seed: u64) -> Result<Manifest> {
    let mut records = manifest.records().to_vec();
    let held_out: HashSet<String> = records
        .iter()
        .filter(|r| matches!(r.split, Split::Valid | Split::Test))
        .filter_map(|r| r.speaker_id.clone())
        .collect();
    let mut candidates: Vec<Vec<usize>> = vec![Vec::new(); N_LANGUAGES];
    for (i, r) in records.iter_mut().enumerate() {
        if matches!(r.split, Split::Train | Split::Unassigned) {
            r.split = Split::Unassigned;
            if in_gate(r) && !r.speaker_id.as_ref().is_some_and(|s| held_out.contains(s)) {
                candidates[r.language].push(i);
            }
        }
    }
    let deficient: Vec<String> = candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| c.len() < per_language)
        .map(|(l, c)| {
            format!(
                "CNT {}: {} eligible training candidates, need {per_language}",
                language_registry()[l].iso639_3,
                c.len()
            )
        })
        .collect();
    if !deficient.is_empty() {
        return Err(Error::Data(format!(
            "insufficient training data\n{}",
            deficient.join("\n")
        )));
    }
    for (lang, mut idx) in candidates.into_iter().enumerate() {
        idx.shuffle(&mut language_rng(seed, lang as u64));
        for &i in &idx[..per_language] {
            records[i].split = Split::Train;
        }
    }
    Manifest::new(records)
}

/// Result of [`split_eval`] plus non-fatal notes (single-gender pools,
/// records without speaker ids).
#[derive(Debug, Clone)]
pub struct SplitOutcome {
    pub manifest: Manifest,
    pub warnings: Vec<String>,
}

#[derive(Debug)]
struct Speaker {
    key: String,
    records: Vec<usize>,
    counts: [usize; 3],
}

#[derive(Debug, Default, Clone, Copy)]
struct Load {
    total: usize,
    by_gender: [usize; 3],
}

impl Load {
    fn needs(&self, n: usize) -> [usize; 3] {
        let half = n / 2;
        [
            n.saturating_sub(self.total),
            half.saturating_sub(self.by_gender[0]),
            half.saturating_sub(self.by_gender[1]),
        ]
    }

    fn gain(&self, sp: &Speaker, n: usize) -> usize {
        let [t, m, f] = self.needs(n);
        sp.records.len().min(t) + sp.counts[0].min(m) + sp.counts[1].min(f)
    }

    fn add(&mut self, sp: &Speaker) {
        self.total += sp.records.len();
        for g in 0..3 {
            self.by_gender[g] += sp.counts[g];
        }
    }
}

fn gender_slot(g: Gender) -> usize {
    match g {
        Gender::Male => 0,
        Gender::Female => 1,
        Gender::Unknown => 2,
    }
}

/// Assigns `per_language` validation and `per_language` test records per
/// language such that no speaker appears in both splits.
///
/// Speakers are placed whole, largest first (ties by id), on the split whose
/// combined shortfall (records, then male and female halves) they reduce
/// most, as long as some subset of the speakers still to come can complete
/// both splits. Fails only when no speaker-disjoint partition exists.
/// Records are then drawn from each split's speakers to minimise `|#m - #f|`,
/// with `u` records counting toward neither side.
pub fn split_eval(manifest: &Manifest, per_language: usize, seed: u64) -> Result<SplitOutcome> {
    let mut records = manifest.records().to_vec();
    let mut warnings = Vec::new();
    let mut failures = Vec::new();
    let mut pools: Vec<Vec<usize>> = vec![Vec::new(); N_LANGUAGES];
    for (i, r) in records.iter_mut().enumerate() {
        if r.split != Split::Train {
            r.split = Split::Unassigned;
            if in_gate(r) {
                pools[r.language].push(i);
            }
        }
    }

    for (lang, pool) in pools.iter().enumerate() {
        let iso = language_registry()[lang].iso639_3;
        let mut by_key: BTreeMap<String, Speaker> = BTreeMap::new();
        let mut anonymous = 0;
        for &i in pool {
            let r = &records[i];
            let key = match &r.speaker_id {
                Some(s) => s.clone(),
                None => {
                    anonymous += 1;
                    format!("~anon:{}", r.id)
                }
            };
            let sp = by_key.entry(key.clone()).or_insert_with(|| Speaker {
                key,
                records: Vec::new(),
                counts: [0; 3],
            });
            sp.records.push(i);
            sp.counts[gender_slot(r.gender)] += 1;
        }
        if anonymous > 0 {
            warnings.push(format!(
                "SPK {iso}: {anonymous} record(s) without speaker id treated as singleton speakers; disjointness cannot be verified for them"
            ));
        }
        let males: usize = by_key.values().map(|s| s.counts[0]).sum();
        let females: usize = by_key.values().map(|s| s.counts[1]).sum();
        if !pool.is_empty() && (males == 0) != (females == 0) {
            let only = if males == 0 { "female" } else { "male" };
            warnings.push(format!(
                "GEN {iso}: evaluation pool is {only}-only; splits cannot be gender balanced"
            ));
        }

        let mut speakers: Vec<Speaker> = by_key.into_values().collect();
        speakers.sort_by(|a, b| {
            b.records
                .len()
                .cmp(&a.records.len())
                .then_with(|| a.key.cmp(&b.key))
        });
        let sizes: Vec<usize> = speakers.iter().map(|s| s.records.len()).collect();
        let reach = SuffixSums::new(&sizes);
        let mut remaining: usize = sizes.iter().sum();
        let mut loads = [Load::default(); 2];
        let mut assigned: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        for (si, sp) in speakers.iter().enumerate() {
            remaining -= sp.records.len();
            let gains = [
                loads[0].gain(sp, per_language),
                loads[1].gain(sp, per_language),
            ];
            if gains == [0, 0] {
                continue;
            }
            let mut order = [0usize, 1];
            let needs = [
                loads[0].needs(per_language)[0],
                loads[1].needs(per_language)[0],
            ];
            if (gains[1], needs[1]) > (gains[0], needs[0]) {
                order = [1, 0];
            }
            let feasible = |s: usize| {
                let mut trial = loads;
                trial[s].add(sp);
                let (a, b) = (
                    trial[0].needs(per_language)[0],
                    trial[1].needs(per_language)[0],
                );
                remaining >= a + b && reach.any_in(si + 1, a, remaining - b)
            };
            let choice = order
                .iter()
                .copied()
                .find(|&s| gains[s] > 0 && feasible(s))
                .unwrap_or_else(|| if needs[1] > needs[0] { 1 } else { 0 });
            loads[choice].add(sp);
            assigned[choice].push(si);
        }

        if loads.iter().any(|l| l.total < per_language) {
            let hist: Vec<String> = speakers
                .iter()
                .map(|s| format!("{}:{}", s.key, s.records.len()))
                .collect();
            failures.push(format!(
                "SPK {iso}: cannot form speaker-disjoint valid/test splits of {per_language} records each (speaker histogram: {})",
                if hist.is_empty() { "empty".to_string() } else { hist.join(" ") }
            ));
            continue;
        }

        for (s, split) in [Split::Valid, Split::Test].into_iter().enumerate() {
            let mut by_gender: [Vec<usize>; 3] = Default::default();
            for &si in &assigned[s] {
                for &i in &speakers[si].records {
                    by_gender[gender_slot(records[i].gender)].push(i);
                }
            }
            let mut rng = language_rng(seed, (N_LANGUAGES + 2 * lang + s) as u64);
            for g in by_gender.iter_mut() {
                g.sort_unstable();
                g.shuffle(&mut rng);
            }
            let take = balanced_take(
                [by_gender[0].len(), by_gender[1].len(), by_gender[2].len()],
                per_language,
            );
            for g in 0..3 {
                for &i in &by_gender[g][..take[g]] {
                    records[i].split = split;
                }
            }
        }
    }

    if !failures.is_empty() {
        return Err(Error::Data(failures.join("\n")));
    }
    Ok(SplitOutcome {
        manifest: Manifest::new(records)?,
        warnings,
    })
}

/// Subset sums reachable from each suffix of a size list, as bitsets.
struct SuffixSums {
    words: usize,
    bits: Vec<Vec<u64>>,
}

impl SuffixSums {
    fn new(sizes: &[usize]) -> Self {
        let total: usize = sizes.iter().sum();
        let words = total / 64 + 1;
        let mut bits = vec![vec![0u64; words]; sizes.len() + 1];
        bits[sizes.len()][0] = 1;
        for i in (0..sizes.len()).rev() {
            let (head, tail) = bits.split_at_mut(i + 1);
            let (next, cur) = (&tail[0], &mut head[i]);
            let (shift_w, shift_b) = (sizes[i] / 64, sizes[i] % 64);
            for w in 0..words {
                let mut v = next[w];
                if w >= shift_w {
                    v |= next[w - shift_w] << shift_b;
                    if shift_b > 0 && w > shift_w {
                        v |= next[w - shift_w - 1] >> (64 - shift_b);
                    }
                }
                cur[w] = v;
            }
        }
        Self { words, bits }
    }

    /// Whether speakers `from..` have a subset summing into `[lo, hi]`.
    fn any_in(&self, from: usize, lo: usize, hi: usize) -> bool {
        let set = &self.bits[from];
        (lo..=hi.min(self.words * 64 - 1)).any(|x| set[x / 64] >> (x % 64) & 1 == 1)
    }
}

/// Counts to draw from (male, female, unknown) pools so that they sum to `n`
/// with the smallest achievable male/female gap. Caller guarantees the pools
/// hold at least `n` records in total.
fn balanced_take(avail: [usize; 3], n: usize) -> [usize; 3] {
    let pairs = avail[0].min(avail[1]).min(n / 2);
    let mut take = [pairs, pairs, 0];
    let mut rest = n - 2 * pairs;
    take[2] = avail[2].min(rest);
    rest -= take[2];
    for g in 0..2 {
        let extra = (avail[g] - take[g]).min(rest);
        take[g] += extra;
        rest -= extra;
    }
    take
}
