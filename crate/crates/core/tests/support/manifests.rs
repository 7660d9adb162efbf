//! Randomized manifests and a checker for the split pipeline
//! (`split_eval`, then `select_training`).

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slid_core::dataset::{
    audit_manifest, select_training, split_eval, AuditExpectations, Gender, Manifest, SampleRecord,
    Split, N_LANGUAGES,
};

fn duration(rng: &mut impl Rng) -> f64 {
    match rng.random_range(0..100) {
        0..=4 => rng.random_range(0.5..3.0),
        5..=9 => rng.random_range(7.000001..12.0),
        10 => 3.0,
        11 => 7.0,
        _ => rng.random_range(3.0..=7.0),
    }
}

fn gender(rng: &mut impl Rng, bias: f64) -> Gender {
    let u: f64 = rng.random();
    if u < 0.05 {
        Gender::Unknown
    } else if u < 0.05 + 0.95 * bias {
        Gender::Male
    } else {
        Gender::Female
    }
}

/// Training-corpus records come pre-marked `train`; evaluation-corpus
/// records are unassigned and grouped by language-scoped speakers.
pub fn random_manifest(seed: u64, train_per: usize, eval_per: usize) -> Manifest {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    for lang in 0..N_LANGUAGES {
        let n_train = train_per + train_per / 8 + rng.random_range(0..train_per / 2 + 2);
        for i in 0..n_train {
            records.push(SampleRecord {
                id: format!("tr-{lang}-{i}"),
                path: format!("tr/{lang}/{i}.mfc"),
                language: lang,
                speaker_id: Some(format!("reader-{lang}")),
                gender: Gender::Male,
                duration_s: duration(&mut rng),
                source: "train-corpus".into(),
                split: Split::Train,
            });
        }
        // A few languages get tight or impossible speaker pools.
        let hard = rng.random_range(0..50) == 0;
        let speakers = if hard {
            rng.random_range(1..=4)
        } else {
            rng.random_range(3..=10)
        };
        let bias = [0.0, 1.0, 0.5, rng.random()][rng.random_range(0..4)];
        let target = if hard {
            2 * eval_per + rng.random_range(0..eval_per + 1)
        } else {
            3 * eval_per + rng.random_range(0..eval_per + 1)
        };
        let weights: Vec<f64> = (0..speakers).map(|_| rng.random_range(0.2..1.0)).collect();
        let wsum: f64 = weights.iter().sum();
        for s in 0..speakers {
            let count = ((target as f64 * weights[s] / wsum).round() as usize).max(1);
            let spk = (rng.random_range(0..20) != 0).then(|| format!("spk-{lang}-{s}"));
            let g = gender(&mut rng, bias);
            for i in 0..count {
                records.push(SampleRecord {
                    id: format!("ev-{lang}-{s}-{i}"),
                    path: format!("ev/{lang}/{s}/{i}.mfc"),
                    language: lang,
                    speaker_id: spk.clone(),
                    gender: if rng.random_range(0..10) == 0 {
                        gender(&mut rng, bias)
                    } else {
                        g
                    },
                    duration_s: duration(&mut rng),
                    source: "eval-corpus".into(),
                    split: Split::Unassigned,
                });
            }
        }
    }
    Manifest::new(records).expect("generated ids are unique")
}

fn in_gate(r: &SampleRecord) -> bool {
    (3.0..=7.0).contains(&r.duration_s)
}

/// True when some set of whole speakers and its complement each hold at
/// least `n` eligible records.
fn disjoint_partition_exists(sizes: &[usize], n: usize) -> bool {
    if sizes.len() > 20 {
        // Large pools are never tight enough to need the oracle.
        return sizes.iter().sum::<usize>() >= 2 * n;
    }
    let total: usize = sizes.iter().sum();
    (0u32..1 << sizes.len()).any(|m| {
        let a: usize = (0..sizes.len())
            .filter(|&i| m >> i & 1 == 1)
            .map(|i| sizes[i])
            .sum();
        a >= n && total - a >= n
    })
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct Tally {
    pub built: usize,
    pub eval_infeasible: usize,
    pub train_deficient: usize,
}

/// Runs the split pipeline and checks disjointness, exact counts, the
/// duration gate and error justification. Returns which branch was taken.
pub fn check_pipeline(
    m: &Manifest,
    train_per: usize,
    eval_per: usize,
    seed: u64,
) -> Result<Tally, String> {
    let mut speaker_sizes: Vec<BTreeMap<String, usize>> = vec![BTreeMap::new(); N_LANGUAGES];
    for r in m.records() {
        if in_gate(r) && r.split != Split::Train {
            let key = r.speaker_id.clone().unwrap_or_else(|| format!("~{}", r.id));
            *speaker_sizes[r.language].entry(key).or_default() += 1;
        }
    }
    let split = match split_eval(m, eval_per, seed) {
        Ok(s) => s,
        Err(e) => {
            for (lang, sizes) in speaker_sizes.iter().enumerate() {
                let sizes: Vec<usize> = sizes.values().copied().collect();
                let iso = slid_core::dataset::language_registry()[lang].iso639_3;
                let named = e.to_string().contains(&format!("SPK {iso}:"));
                if named == disjoint_partition_exists(&sizes, eval_per) {
                    return Err(format!(
                        "split_eval on {iso} (speakers {sizes:?}): error named it = {named}: {e}"
                    ));
                }
            }
            return Ok(Tally {
                eval_infeasible: 1,
                ..Tally::default()
            });
        }
    };
    let held_out: BTreeSet<&str> = split
        .manifest
        .records()
        .iter()
        .filter(|r| matches!(r.split, Split::Valid | Split::Test))
        .filter_map(|r| r.speaker_id.as_deref())
        .collect();
    let mut train_eligible = [0usize; N_LANGUAGES];
    for r in split.manifest.records() {
        let free = r
            .speaker_id
            .as_deref()
            .is_none_or(|s| !held_out.contains(s));
        if in_gate(r) && matches!(r.split, Split::Train | Split::Unassigned) && free {
            train_eligible[r.language] += 1;
        }
    }
    let trained = match select_training(&split.manifest, train_per, seed) {
        Ok(t) => t,
        Err(e) => {
            let text = e.to_string();
            for (lang, &n) in train_eligible.iter().enumerate() {
                let iso = slid_core::dataset::language_registry()[lang].iso639_3;
                if text.contains(&format!("CNT {iso}:")) != (n < train_per) {
                    return Err(format!(
                        "select_training deficiency report wrong for {iso} ({n} eligible): {text}"
                    ));
                }
            }
            return Ok(Tally {
                train_deficient: 1,
                ..Tally::default()
            });
        }
    };

    let mut counts = [[0usize; 3]; N_LANGUAGES];
    let mut speakers: [BTreeSet<String>; 2] = Default::default();
    for (before, after) in m.records().iter().zip(trained.records()) {
        if before.id != after.id {
            return Err("record order changed".into());
        }
        let slot = match after.split {
            Split::Train => 0,
            Split::Valid => 1,
            Split::Test => 2,
            Split::Unassigned => continue,
        };
        if !in_gate(after) {
            return Err(format!(
                "{} assigned to {} with duration {}",
                after.id,
                after.split.token(),
                after.duration_s
            ));
        }
        if slot == 0
            && after
                .speaker_id
                .as_deref()
                .is_some_and(|s| held_out.contains(s))
        {
            return Err(format!(
                "training record {} shares a held-out speaker",
                after.id
            ));
        }
        if slot > 0 && before.split == Split::Train {
            return Err(format!(
                "training-corpus record {} placed in {}",
                after.id,
                after.split.token()
            ));
        }
        counts[after.language][slot] += 1;
        if slot > 0 {
            let key = after
                .speaker_id
                .clone()
                .unwrap_or_else(|| format!("~{}", after.id));
            speakers[slot - 1].insert(key);
        }
    }
    for (lang, c) in counts.iter().enumerate() {
        if *c != [train_per, eval_per, eval_per] {
            return Err(format!("language {lang}: counts {c:?}"));
        }
    }
    if let Some(s) = speakers[0].intersection(&speakers[1]).next() {
        return Err(format!("speaker {s} in both valid and test"));
    }
    let expect = AuditExpectations {
        train_per_language: train_per,
        eval_per_language: eval_per,
        ..AuditExpectations::default()
    };
    let violations = audit_manifest(&trained, &expect);
    if !violations.is_empty() {
        return Err(format!(
            "audit: {:?}",
            violations.iter().map(|v| v.to_string()).collect::<Vec<_>>()
        ));
    }
    Ok(Tally {
        built: 1,
        ..Tally::default()
    })
}

/// Runs `cases` randomized manifests; the first failure is returned.
pub fn run_cases(cases: u64, train_per: usize, eval_per: usize) -> Result<Tally, String> {
    let mut total = Tally::default();
    for case in 0..cases {
        let m = random_manifest(case, train_per, eval_per);
        let t = check_pipeline(&m, train_per, eval_per, case)
            .map_err(|e| format!("case {case}: {e}"))?;
        total.built += t.built;
        total.eval_infeasible += t.eval_infeasible;
        total.train_deficient += t.train_deficient;
    }
    Ok(total)
}
