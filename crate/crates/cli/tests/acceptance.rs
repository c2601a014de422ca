//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Every check compares the library against an oracle written here from
//! scratch: brute-force enumeration, direct arithmetic or a naive
//! reimplementation of the rule under test.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use lyricscope::assoc::{
    aggregate_multiseed, balance_word_sets, sc_weat, standard, standard_word_sets, sweat, weat,
    AssociationResult, PermutationConfig, Sampling, WordSet, MIN_WORD_FREQUENCY,
};
use lyricscope::corpus::{ArtistType, Gender, SongRecord};
use lyricscope::dedup::cluster_duplicates;
use lyricscope::embeddings::{train_documents, EmbeddingSpace, FrequencyTable, TrainConfig};
use lyricscope::matching::{exact_join, match_records, ChartEntry, ChartSource, MatchConfig};
use lyricscope::sexism::{always_sexist, evaluate, label_song, make_batches, LabelConfig};
use lyricscope::Error;
use lyricscope_cli::fixture::{filler_vocabulary, planted_documents, PlantedPair};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Vector = Vec<f64>;

// ---------------------------------------------------------------------------
// Brute-force association oracles over raw vectors.

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

fn s_of(w: &[f64], a: &[Vector], b: &[Vector]) -> f64 {
    let ma = a.iter().map(|v| cosine(w, v)).sum::<f64>() / a.len() as f64;
    let mb = b.iter().map(|v| cosine(w, v)).sum::<f64>() / b.len() as f64;
    ma - mb
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sample_var(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
}

/// Bitmasks over `n` positions with exactly `k` bits set.
fn subsets(n: usize, k: usize) -> Vec<u32> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .collect()
}

struct Oracle {
    effect: f64,
    statistic: f64,
    /// Fraction of permutations strictly above the observed statistic.
    p_gt: f64,
    /// Fraction at or above it, ties included.
    p_ge: f64,
}

const TIE: f64 = 1e-9;

fn tails(observed: f64, permuted: &[f64]) -> (f64, f64) {
    let gt = permuted.iter().filter(|s| **s > observed + TIE).count();
    let ge = permuted.iter().filter(|s| **s >= observed - TIE).count();
    let n = permuted.len() as f64;
    (gt as f64 / n, ge as f64 / n)
}

fn oracle_weat(x: &[Vector], y: &[Vector], a: &[Vector], b: &[Vector]) -> Oracle {
    let sx: Vec<f64> = x.iter().map(|w| s_of(w, a, b)).collect();
    let sy: Vec<f64> = y.iter().map(|w| s_of(w, a, b)).collect();
    let (nx, ny) = (sx.len() as f64, sy.len() as f64);
    let pooled =
        (((nx - 1.0) * sample_var(&sx) + (ny - 1.0) * sample_var(&sy)) / (nx + ny - 2.0)).sqrt();
    let effect = if pooled > 0.0 {
        (mean(&sx) - mean(&sy)) / pooled
    } else {
        0.0
    };
    let statistic = sx.iter().sum::<f64>() - sy.iter().sum::<f64>();
    let all: Vec<f64> = sx.iter().chain(&sy).copied().collect();
    let permuted: Vec<f64> = subsets(all.len(), sx.len())
        .into_iter()
        .map(|m| {
            (0..all.len())
                .map(|i| if m >> i & 1 == 1 { all[i] } else { -all[i] })
                .sum()
        })
        .collect();
    let (p_gt, p_ge) = tails(statistic, &permuted);
    Oracle {
        effect,
        statistic,
        p_gt,
        p_ge,
    }
}

fn oracle_sc_weat(w: &[Vector], a: &[Vector], b: &[Vector]) -> Oracle {
    let s: Vec<f64> = w.iter().map(|v| s_of(v, a, b)).collect();
    let sd = sample_var(&s).sqrt();
    let effect = if sd > 0.0 { mean(&s) / sd } else { 0.0 };
    let statistic: f64 = s.iter().sum();
    let pool: Vec<Vector> = a.iter().chain(b).cloned().collect();
    let permuted: Vec<f64> = subsets(pool.len(), a.len())
        .into_iter()
        .map(|m| {
            let (ai, bi): (Vec<_>, Vec<_>) = (0..pool.len()).partition(|i| m >> i & 1 == 1);
            let ai: Vec<Vector> = ai.into_iter().map(|i| pool[i].clone()).collect();
            let bi: Vec<Vector> = bi.into_iter().map(|i| pool[i].clone()).collect();
            w.iter().map(|v| s_of(v, &ai, &bi)).sum()
        })
        .collect();
    let (p_gt, p_ge) = tails(statistic, &permuted);
    Oracle {
        effect,
        statistic,
        p_gt,
        p_ge,
    }
}

/// `w1`, `a1`, `b1` are the vectors in the first space, `w2`... in the second.
fn oracle_sweat(first: [&[Vector]; 3], second: [&[Vector]; 3]) -> Oracle {
    let d: Vec<f64> = (0..first[0].len())
        .map(|i| s_of(&first[0][i], first[1], first[2]) - s_of(&second[0][i], second[1], second[2]))
        .collect();
    let statistic: f64 = d.iter().sum();
    let permuted: Vec<f64> = (0u32..1 << d.len())
        .map(|m| {
            (0..d.len())
                .map(|i| if m >> i & 1 == 1 { -d[i] } else { d[i] })
                .sum()
        })
        .collect();
    let (p_gt, p_ge) = tails(statistic, &permuted);
    Oracle {
        effect: statistic,
        statistic,
        p_gt,
        p_ge,
    }
}

// ---------------------------------------------------------------------------
// Random instances.

struct Instance {
    vectors: BTreeMap<String, Vector>,
    x: WordSet,
    y: WordSet,
    a: WordSet,
    b: WordSet,
}

impl Instance {
    fn random(rng: &mut ChaCha8Rng, half: usize, attrs: (usize, usize), dim: usize) -> Self {
        let mut vectors = BTreeMap::new();
        let mut make = |prefix: &str, n: usize, rng: &mut ChaCha8Rng| {
            let words: Vec<String> = (0..n).map(|i| format!("{prefix}{i}")).collect();
            for w in &words {
                let v: Vector = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                vectors.insert(w.clone(), v);
            }
            WordSet::new(prefix, &words).unwrap()
        };
        let x = make("x", half, rng);
        let y = make("y", half, rng);
        let a = make("a", attrs.0, rng);
        let b = make("b", attrs.1, rng);
        Instance {
            vectors,
            x,
            y,
            a,
            b,
        }
    }

    fn space(&self, name: &str) -> EmbeddingSpace {
        let pairs: Vec<(&str, Vector)> = self
            .vectors
            .iter()
            .map(|(w, v)| (w.as_str(), v.clone()))
            .collect();
        EmbeddingSpace::from_pairs(name, &pairs).unwrap()
    }

    fn vecs(&self, set: &WordSet) -> Vec<Vector> {
        set.words.iter().map(|w| self.vectors[w].clone()).collect()
    }
}

fn exact_cfg() -> PermutationConfig {
    PermutationConfig::default()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

// ---------------------------------------------------------------------------
// Criteria.

fn c1_exact_permutation_oracle() -> String {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst_sampled = 0.0f64;
    let instances = 60;
    for i in 0..instances {
        let half = [2, 3, 4][i % 3];
        let attrs = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let inst = Instance::random(&mut rng, half, attrs, 5);
        let space = inst.space("rand");
        let (xv, yv, av, bv) = (
            inst.vecs(&inst.x),
            inst.vecs(&inst.y),
            inst.vecs(&inst.a),
            inst.vecs(&inst.b),
        );
        let oracle = oracle_weat(&xv, &yv, &av, &bv);

        let exact = weat(&inst.x, &inst.y, &inst.a, &inst.b, &space, &exact_cfg()).unwrap();
        assert!(exact.exact_enumeration, "instance {i} not enumerated");
        assert_eq!(
            exact.n_permutations_used as usize,
            subsets(2 * half, half).len()
        );
        assert_eq!(exact.p_value, oracle.p_gt, "instance {i}: exact p");
        assert!(
            close(exact.effect_or_score, oracle.effect, 1e-9),
            "instance {i}: effect"
        );

        let sampled_cfg = PermutationConfig {
            n_perm: 10_000,
            seed: 1000 + i as u64,
            sampling: Sampling::Sampled,
        };
        let sampled = weat(&inst.x, &inst.y, &inst.a, &inst.b, &space, &sampled_cfg).unwrap();
        assert!(!sampled.exact_enumeration);
        assert_eq!(sampled.n_permutations_used, 10_000);
        let gap = (sampled.p_value - exact.p_value).abs();
        worst_sampled = worst_sampled.max(gap);
        assert!(gap <= 0.02, "instance {i}: sampled p off by {gap}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    format!(
        "{instances} instances, max |sampled - exact| = {worst_sampled:.4}, {:.1}s",
        elapsed.as_secs_f64()
    )
}

fn hand_vectors() -> BTreeMap<&'static str, Vector> {
    BTreeMap::from([
        ("x1", vec![1.0, 0.0]),
        ("x2", vec![0.9, 0.1]),
        ("y1", vec![0.0, 1.0]),
        ("y2", vec![0.1, 0.9]),
        ("a", vec![1.0, 0.0]),
        ("b", vec![0.0, 1.0]),
    ])
}

fn set(name: &str, words: &[&str]) -> WordSet {
    WordSet::new(name, words).unwrap()
}

fn c2_hand_instances() -> String {
    let hv = hand_vectors();
    let pairs: Vec<(&str, Vector)> = hv.iter().map(|(w, v)| (*w, v.clone())).collect();
    let space = EmbeddingSpace::from_pairs("hand", &pairs).unwrap();
    let v = |ws: &[&str]| -> Vec<Vector> { ws.iter().map(|w| hv[w].clone()).collect() };

    // WEAT: X = {x1, x2}, Y = {y1, y2}, A = {a}, B = {b}.
    let r = weat(
        &set("X", &["x1", "x2"]),
        &set("Y", &["y1", "y2"]),
        &set("A", &["a"]),
        &set("B", &["b"]),
        &space,
        &exact_cfg(),
    )
    .unwrap();
    let o = oracle_weat(&v(&["x1", "x2"]), &v(&["y1", "y2"]), &v(&["a"]), &v(&["b"]));
    // Closed form: s = 1, c, -1, -c with c = 0.8 / sqrt(0.82).
    let c = 0.8 / 0.82f64.sqrt();
    let hand_effect = (1.0 + c) / ((1.0 - c) / 2f64.sqrt());
    assert!(close(o.effect, hand_effect, 1e-12));
    assert!(r.effect_or_score > 0.0);
    assert!(
        close(r.effect_or_score, o.effect, 1e-9),
        "weat effect {}",
        r.effect_or_score
    );
    assert!(close(r.statistic, o.statistic, 1e-9));
    assert!(r.exact_enumeration && r.n_permutations_used == 6);
    assert_eq!(r.p_value, o.p_gt);
    assert_eq!(o.p_gt, 0.0);
    assert!(close(o.p_ge, 1.0 / 6.0, 1e-15));

    // SC-WEAT: W = {x1, x2} leans towards A.
    let w = set("W", &["x1", "x2"]);
    let (a, b) = (set("A", &["a"]), set("B", &["b"]));
    let r = sc_weat(&w, &a, &b, &space, &exact_cfg()).unwrap();
    let o = oracle_sc_weat(&v(&["x1", "x2"]), &v(&["a"]), &v(&["b"]));
    assert!(r.effect_or_score > 0.0);
    assert!(close(r.effect_or_score, o.effect, 1e-9));
    assert!(close(r.statistic, o.statistic, 1e-9));
    assert_eq!(r.p_value, o.p_gt);

    // SWEAT: |W| = 3 against a second hand space, all 8 sign flips.
    let other_vectors = BTreeMap::from([
        ("x1", vec![0.2, 1.0]),
        ("x2", vec![1.0, 0.3]),
        ("y1", vec![0.5, 0.5]),
        ("a", vec![1.0, 0.0]),
        ("b", vec![0.0, 1.0]),
    ]);
    let other_pairs: Vec<(&str, Vector)> =
        other_vectors.iter().map(|(w, v)| (*w, v.clone())).collect();
    let other = EmbeddingSpace::from_pairs("other", &other_pairs).unwrap();
    let ov = |ws: &[&str]| -> Vec<Vector> { ws.iter().map(|w| other_vectors[w].clone()).collect() };
    let w3 = ["x1", "x2", "y1"];
    let r = sweat(&set("W", &w3), &a, &b, &space, &other, &exact_cfg()).unwrap();
    let o = oracle_sweat(
        [&v(&w3), &v(&["a"]), &v(&["b"])],
        [&ov(&w3), &ov(&["a"]), &ov(&["b"])],
    );
    assert!(close(r.effect_or_score, o.statistic, 1e-9));
    assert!(r.exact_enumeration && r.n_permutations_used == 8);
    assert_eq!(r.p_value, o.p_gt);

    "WEAT, SC-WEAT, SWEAT within 1e-9; WEAT p = 0 strict (1/6 counting ties)".into()
}

fn negates(f: &AssociationResult, g: &AssociationResult) -> bool {
    close(f.effect_or_score, -g.effect_or_score, 1e-12) && close(f.statistic, -g.statistic, 1e-12)
}

fn c3_antisymmetry() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for i in 0..100 {
        let half = rng.gen_range(2..=5);
        let m = rng.gen_range(1..=4);
        let dim = rng.gen_range(2..=8);
        let inst = Instance::random(&mut rng, half, (m, m), dim);
        let sp = inst.space("one");
        let (x, y, a, b) = (&inst.x, &inst.y, &inst.a, &inst.b);
        let cfg = exact_cfg().with_seed(i);

        let base = weat(x, y, a, b, &sp, &cfg).unwrap();
        assert!(
            negates(&base, &weat(y, x, a, b, &sp, &cfg).unwrap()),
            "weat X<->Y {i}"
        );
        assert!(
            negates(&base, &weat(x, y, b, a, &sp, &cfg).unwrap()),
            "weat A<->B {i}"
        );

        let sc = sc_weat(x, a, b, &sp, &cfg).unwrap();
        assert!(
            negates(&sc, &sc_weat(x, b, a, &sp, &cfg).unwrap()),
            "sc_weat {i}"
        );

        let second = Instance::random(&mut rng, half, (m, m), dim).space("two");
        let fwd = sweat(x, a, b, &sp, &second, &cfg).unwrap();
        let rev = sweat(x, a, b, &second, &sp, &cfg).unwrap();
        assert!(negates(&fwd, &rev), "sweat {i}");
    }
    "100 instances, weat/sc_weat/sweat negate within 1e-12".into()
}

fn scaled(inst: &Instance, rng: &mut ChaCha8Rng, name: &str) -> EmbeddingSpace {
    let mut sp = inst.space(name);
    for w in inst.vectors.keys() {
        let k = 10f64.powf(rng.gen_range(-4.0..4.0));
        sp.scale_vector(w, k).unwrap();
    }
    sp
}

fn same_bits(f: &AssociationResult, g: &AssociationResult) -> bool {
    f.effect_or_score.to_bits() == g.effect_or_score.to_bits()
        && f.statistic.to_bits() == g.statistic.to_bits()
        && f.p_value.to_bits() == g.p_value.to_bits()
}

fn c4_scale_invariance() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for trial in 0..20 {
        let inst = Instance::random(&mut rng, 3, (3, 3), 6);
        let other = Instance::random(&mut rng, 3, (3, 3), 6);
        let (x, y, a, b) = (&inst.x, &inst.y, &inst.a, &inst.b);
        let cfg = exact_cfg();
        let (p, q) = (inst.space("p"), other.space("q"));
        let (ps, qs) = (scaled(&inst, &mut rng, "p"), scaled(&other, &mut rng, "q"));

        let r = weat(x, y, a, b, &p, &cfg).unwrap();
        assert!(r.exact_enumeration);
        assert!(
            same_bits(&r, &weat(x, y, a, b, &ps, &cfg).unwrap()),
            "weat trial {trial}"
        );
        let r = sc_weat(x, a, b, &p, &cfg).unwrap();
        assert!(r.exact_enumeration);
        assert!(
            same_bits(&r, &sc_weat(x, a, b, &ps, &cfg).unwrap()),
            "sc_weat trial {trial}"
        );
        let r = sweat(x, a, b, &p, &q, &cfg).unwrap();
        assert!(r.exact_enumeration);
        assert!(
            same_bits(&r, &sweat(x, a, b, &ps, &qs, &cfg).unwrap()),
            "sweat trial {trial}"
        );
    }
    "20 trials, effects, statistics and exact p bit-identical".into()
}

fn planted_run(pair: &PlantedPair, sets: [&WordSet; 4]) -> (Vec<AssociationResult>, u64) {
    let exclude: BTreeSet<String> = sets.iter().flat_map(|s| s.words.iter().cloned()).collect();
    let filler = filler_vocabulary(&exclude);
    let docs = planted_documents(std::slice::from_ref(pair), &filler, 2200, 12, 0.5, 55);
    let refs: Vec<&str> = docs.iter().map(String::as_str).collect();
    let tokens = FrequencyTable::from_documents(refs.iter().copied()).total_tokens();
    let results = (0..5)
        .map(|seed| {
            let cfg = TrainConfig {
                dim: 50,
                epochs: 5,
                window: 4,
                seed,
                ..TrainConfig::default()
            };
            let (space, _) = train_documents(&refs, &cfg, "planted").unwrap();
            let [x, y, a, b] = sets;
            weat(x, y, a, b, &space, &exact_cfg().with_seed(seed)).unwrap()
        })
        .collect();
    (results, tokens)
}

fn c5_planted_bias() -> String {
    let start = Instant::now();
    let sets = standard_word_sets();
    let find = |n: &str| sets.iter().find(|s| s.name == n).unwrap().clone();
    let (x, y) = (find(standard::FLOWERS), find(standard::INSECTS));
    let (a, b) = (find(standard::PLEASANT), find(standard::UNPLEASANT));

    let forward = PlantedPair::from_sets(&x, &y, &a, &b, 0.9);
    let (results, tokens) = planted_run(&forward, [&x, &y, &a, &b]);
    assert!((150_000..=250_000).contains(&tokens), "{tokens} tokens");
    let agg = aggregate_multiseed(results).unwrap();
    let effect = agg.reported.effect_or_score;
    let worst_p = agg.per_seed.iter().map(|r| r.p_value).fold(0.0, f64::max);
    assert!(effect > 1.0, "effect {effect}");
    assert!(agg.per_seed.iter().all(|r| r.effect_or_score > 1.0));
    assert!(agg.significant_at.p05, "worst p {worst_p}");

    let reversed = PlantedPair::from_sets(&x, &y, &b, &a, 0.9);
    let (results, _) = planted_run(&reversed, [&x, &y, &a, &b]);
    let rev = aggregate_multiseed(results).unwrap();
    assert!(rev.per_seed.iter().all(|r| r.effect_or_score < 0.0));
    let rev_effect = rev.reported.effect_or_score;

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    format!(
        "{tokens} tokens, effect {effect:.2} (max p {worst_p}), reversed {rev_effect:.2}, {:.1}s",
        elapsed.as_secs_f64()
    )
}

fn c6_baseline() -> String {
    let gold: BTreeMap<String, bool> = (0..190)
        .map(|i| (format!("song{i:03}"), i % 190 < 77))
        .collect();
    assert_eq!(gold.values().filter(|g| **g).count(), 77);
    let r = evaluate(&always_sexist(&gold), &gold).unwrap();

    // Direct arithmetic: every song predicted positive.
    let p = 77.0 / 190.0;
    let f1 = 2.0 * p / (p + 1.0);
    let derived = [
        (r.sexist.precision, p),
        (r.sexist.recall, 1.0),
        (r.sexist.f1, f1),
        (r.macro_avg.precision, p / 2.0),
        (r.macro_avg.recall, 0.5),
        (r.macro_avg.f1, f1 / 2.0),
    ];
    for (got, want) in derived {
        assert!(close(got, want, 1e-12), "{got} vs {want}");
    }
    let rounded = [0.41, 1.00, 0.58, 0.20, 0.50, 0.29];
    for ((got, _), want) in derived.iter().zip(rounded) {
        assert!(close(*got, want, 0.005), "{got} vs rounded {want}");
    }
    format!(
        "sexist P/R/F1 {:.3}/{:.3}/{:.3}, macro {:.3}/{:.3}/{:.3}",
        r.sexist.precision,
        r.sexist.recall,
        r.sexist.f1,
        r.macro_avg.precision,
        r.macro_avg.recall,
        r.macro_avg.f1
    )
}

fn c7_batching_and_labeling() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    for l in 4..=200usize {
        for _ in 0..3 {
            let lines: Vec<String> = (0..l)
                .map(|i| format!("line {i} {}", rng.gen_range(0..1000)))
                .collect();
            // Blank lines are ignored when batching.
            let lyric = lines
                .iter()
                .map(|s| {
                    if rng.gen_bool(0.1) {
                        format!("{s}\n")
                    } else {
                        s.clone()
                    }
                })
                .collect::<Vec<_>>()
                .join("\n");
            let batches = make_batches("s", &lyric).unwrap();
            assert_eq!(batches.len(), (l - 2).div_ceil(2), "L = {l}");
            for (k, batch) in batches.iter().enumerate() {
                assert_eq!(batch.batch_index, k);
                assert_eq!(batch.first_line, 2 * k);
                let end = (2 * k + 4).min(l);
                assert_eq!(batch.lines, lines[2 * k..end], "L = {l}, batch {k}");
                if k > 0 {
                    assert_eq!(batches[k - 1].lines[2..], batch.lines[..2]);
                }
            }
            assert_eq!(batches.last().unwrap().lines.last(), lines.last());
        }
    }

    let thresholds = [0.0, 0.1, 0.3, 0.5, 0.725, 0.9, 0.99, 1.0];
    for _ in 0..1000 {
        let n = rng.gen_range(1..=40);
        let probs: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        for n_b in 1..=5 {
            for w in thresholds.windows(2) {
                let lo = label_song(
                    &probs,
                    &LabelConfig {
                        threshold: w[0],
                        n_b,
                    },
                );
                let hi = label_song(
                    &probs,
                    &LabelConfig {
                        threshold: w[1],
                        n_b,
                    },
                );
                assert!(!hi.sexist || lo.sexist);
                assert!(hi.n_flagged <= lo.n_flagged);
            }
            for &t in &thresholds {
                let fewer = label_song(&probs, &LabelConfig { threshold: t, n_b });
                let more = label_song(
                    &probs,
                    &LabelConfig {
                        threshold: t,
                        n_b: n_b + 1,
                    },
                );
                assert!(!more.sexist || fewer.sexist);
                let flagged = probs.iter().filter(|p| **p > t).count();
                assert_eq!(fewer.sexist, flagged >= n_b);
            }
        }
    }
    "L = 4..200 batch law and overlap, 1000 score vectors monotone".into()
}

fn record(id: &str, artist: &str, year: i32, lyrics: String) -> SongRecord {
    SongRecord {
        song_id: id.to_owned(),
        title: format!("title {id}"),
        artist_id: artist.to_owned(),
        artist_name: artist.to_owned(),
        artist_type: ArtistType::Solo,
        gender: Gender::Female,
        year,
        genre_raw: None,
        genre_top: None,
        language: "en".into(),
        lyrics,
        member_genders: None,
    }
}

fn triples(lyrics: &str) -> BTreeSet<(String, String, String)> {
    let t: Vec<&str> = lyrics.split_whitespace().collect();
    t.windows(3)
        .map(|w| (w[0].to_owned(), w[1].to_owned(), w[2].to_owned()))
        .collect()
}

fn c8_dedup() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let vocab: Vec<String> = (0..4000).map(|i| format!("w{i}")).collect();
    let artists: Vec<String> = (0..60).map(|i| format!("artist{i}")).collect();
    let lyric = |tokens: &[String]| {
        tokens
            .chunks(8)
            .map(|c| c.join(" "))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let mut songs = Vec::new();
    let mut base_tokens = Vec::new();
    for i in 0..150 {
        let n = rng.gen_range(40..90);
        let tokens: Vec<String> = (0..n)
            .map(|_| vocab.choose(&mut rng).unwrap().clone())
            .collect();
        let artist = artists.choose(&mut rng).unwrap();
        songs.push(record(
            &format!("b{i:03}"),
            artist,
            rng.gen_range(1965..2005),
            lyric(&tokens),
        ));
        base_tokens.push(tokens);
    }
    let mut exact_pairs = Vec::new();
    for i in 0..40 {
        let src = rng.gen_range(0..150);
        let artist = if i % 2 == 0 {
            songs[src].artist_id.clone()
        } else {
            artists.choose(&mut rng).unwrap().clone()
        };
        let id = format!("e{i:03}");
        songs.push(record(
            &id,
            &artist,
            rng.gen_range(1965..2010),
            lyric(&base_tokens[src]),
        ));
        exact_pairs.push((songs[src].song_id.clone(), id));
    }
    for i in 0..60 {
        let src = rng.gen_range(0..150);
        let mut tokens = base_tokens[src].clone();
        let budget = ((tokens.len() as f64 * 0.2).ceil() as usize - 1).max(1);
        let k = rng.gen_range(1..=budget);
        for pos in rand::seq::index::sample(&mut rng, tokens.len(), k) {
            tokens[pos] = vocab.choose(&mut rng).unwrap().clone();
        }
        let artist = if rng.gen_bool(0.5) {
            songs[src].artist_id.clone()
        } else {
            artists.choose(&mut rng).unwrap().clone()
        };
        songs.push(record(
            &format!("n{i:03}"),
            &artist,
            rng.gen_range(1965..2010),
            lyric(&tokens),
        ));
    }

    // All-pairs Jaccard, then connected components by flood fill.
    let sets: Vec<_> = songs.iter().map(|s| triples(&s.lyrics)).collect();
    let n = songs.len();
    let mut adj = vec![Vec::new(); n];
    let mut near_links = 0;
    for i in 0..n {
        for j in i + 1..n {
            let inter = sets[i].intersection(&sets[j]).count();
            let union = sets[i].len() + sets[j].len() - inter;
            if union > 0 && inter as f64 / union as f64 > 0.8 {
                adj[i].push(j);
                adj[j].push(i);
                near_links += 1;
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut oracle_clusters: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = oracle_clusters.len();
        let mut stack = vec![s];
        let mut members = Vec::new();
        comp[s] = id;
        while let Some(u) = stack.pop() {
            members.push(u);
            for &v in &adj[u] {
                if comp[v] == usize::MAX {
                    comp[v] = id;
                    stack.push(v);
                }
            }
        }
        oracle_clusters.push(members);
    }
    oracle_clusters.retain(|m| m.len() > 1);

    let out = cluster_duplicates(&songs, 0.8).unwrap();
    assert_eq!(out.clusters.len(), oracle_clusters.len());
    let by_members: HashMap<Vec<String>, _> = out
        .clusters
        .iter()
        .map(|c| (c.member_ids.clone(), c))
        .collect();
    let mut expected_dropped = BTreeSet::new();
    for members in &oracle_clusters {
        let mut ids: Vec<String> = members.iter().map(|&i| songs[i].song_id.clone()).collect();
        ids.sort();
        let cluster = by_members
            .get(&ids)
            .unwrap_or_else(|| panic!("missing cluster {ids:?}"));
        let mut ordered = members.clone();
        ordered.sort_by_key(|&i| (songs[i].year, songs[i].song_id.clone()));
        let canon = &songs[ordered[0]];
        let min_year = members.iter().map(|&i| songs[i].year).min().unwrap();
        assert_eq!(canon.year, min_year);
        assert_eq!(cluster.canonical_id, canon.song_id);
        let mut covers = BTreeSet::new();
        let mut seen = BTreeSet::from([canon.artist_id.clone()]);
        for &m in &ordered[1..] {
            if seen.insert(songs[m].artist_id.clone()) {
                covers.insert(songs[m].song_id.clone());
            } else {
                expected_dropped.insert(songs[m].song_id.clone());
            }
        }
        assert_eq!(cluster.covers, covers.into_iter().collect::<Vec<_>>());
    }
    assert_eq!(
        out.dropped,
        expected_dropped.iter().cloned().collect::<Vec<_>>()
    );
    assert_eq!(out.retained.len(), n - expected_dropped.len());

    let cluster_of: HashMap<&str, usize> = out
        .clusters
        .iter()
        .enumerate()
        .flat_map(|(k, c)| c.member_ids.iter().map(move |id| (id.as_str(), k)))
        .collect();
    for (src, copy) in &exact_pairs {
        let (a, b) = (cluster_of.get(src.as_str()), cluster_of.get(copy.as_str()));
        assert!(
            a.is_some() && a == b,
            "exact duplicate {copy} of {src} not clustered"
        );
    }
    format!(
        "{n} songs, {} clusters match the all-pairs oracle ({near_links} links), exact recall 1.0",
        out.clusters.len()
    )
}

fn oracle_normalize(s: &str) -> String {
    let lower = s.to_lowercase();
    let mut out = String::new();
    let mut depth = 0;
    for c in lower.chars() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' if depth > 0 => {
                depth -= 1;
                out.push(' ');
            }
            '\'' => {}
            _ if depth > 0 => {}
            c if c.is_ascii_alphanumeric() => out.push(c),
            _ => out.push(' '),
        }
    }
    let mut words: Vec<&str> = out.split_whitespace().collect();
    while words.len() > 1 && words[0] == "the" {
        words.remove(0);
    }
    words.join(" ")
}

fn c9_matching() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let adjectives = [
        "silver", "broken", "golden", "midnight", "electric", "velvet", "lonely", "wild",
    ];
    let nouns = [
        "foxes", "hearts", "riders", "roses", "echoes", "saints", "kings", "dreams",
    ];
    let title_words = [
        "love", "me", "tender", "night", "fire", "down", "road", "baby", "home", "rain", "dancing",
        "forever",
    ];
    let mut corpus = Vec::new();
    for i in 0..260 {
        let artist = format!(
            "{}{} {}",
            if rng.gen_bool(0.3) { "The " } else { "" },
            adjectives[rng.gen_range(0..adjectives.len())],
            nouns[rng.gen_range(0..nouns.len())]
        );
        let n = rng.gen_range(2..=4);
        let title: Vec<&str> = (0..n)
            .map(|_| *title_words.choose(&mut rng).unwrap())
            .collect();
        let mut rec = record(
            &format!("s{i:03}"),
            &artist,
            rng.gen_range(1960..2010),
            String::new(),
        );
        rec.title = title.join(" ");
        corpus.push(rec);
    }
    let typo = |s: &str, rng: &mut ChaCha8Rng| {
        let mut chars: Vec<char> = s.chars().collect();
        let i = rng.gen_range(0..chars.len());
        chars[i] = (b'a' + rng.gen_range(0..26)) as char;
        chars.into_iter().collect::<String>()
    };
    let mut entries = Vec::new();
    for k in 0..500 {
        let song = corpus.choose(&mut rng).unwrap();
        let (mut artist, mut title) = (song.artist_name.clone(), song.title.clone());
        match k % 6 {
            0 => {}
            1 => {
                artist = artist.to_uppercase();
                title = format!("{title} (Remastered)");
            }
            2 => title = typo(&title, &mut rng),
            3 => artist = typo(&artist, &mut rng),
            4 => title = title.replace("dancing", "dancin'").replace("me", "m.e."),
            _ => {
                title = format!("{} {}", title_words.choose(&mut rng).unwrap(), title);
                if rng.gen_bool(0.5) {
                    artist = format!("The {artist}");
                }
            }
        }
        entries.push(ChartEntry {
            source: ChartSource::BillboardHot100,
            artist_name: artist,
            title,
            week_or_year: None,
            payload: None,
        });
    }

    let grid = [0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 0.95, 1.0];
    let mut matched: BTreeMap<(usize, usize), BTreeSet<usize>> = BTreeMap::new();
    for (i, &at) in grid.iter().enumerate() {
        for (j, &tt) in grid.iter().enumerate() {
            let cfg = MatchConfig {
                artist_threshold: at,
                title_threshold: tt,
            };
            let res = match_records(&entries, &corpus, &cfg).unwrap();
            let hits = res
                .iter()
                .enumerate()
                .filter(|(_, r)| r.matched_song_id.is_some())
                .map(|(k, _)| k)
                .collect();
            matched.insert((i, j), hits);
        }
    }
    for (&(i, j), hits) in &matched {
        if i + 1 < grid.len() {
            assert!(
                matched[&(i + 1, j)].is_subset(hits),
                "artist threshold raise at {i},{j}"
            );
        }
        if j + 1 < grid.len() {
            assert!(
                matched[&(i, j + 1)].is_subset(hits),
                "title threshold raise at {i},{j}"
            );
        }
    }

    let strict = MatchConfig {
        artist_threshold: 1.0,
        title_threshold: 1.0,
    };
    let got: Vec<Option<String>> = match_records(&entries, &corpus, &strict)
        .unwrap()
        .into_iter()
        .map(|r| r.matched_song_id)
        .collect();
    assert_eq!(got, exact_join(&entries, &corpus));
    let mut by_key: BTreeMap<(String, String), (i32, String)> = BTreeMap::new();
    for r in &corpus {
        let key = (oracle_normalize(&r.artist_name), oracle_normalize(&r.title));
        let cand = (r.year, r.song_id.clone());
        let slot = by_key.entry(key).or_insert(cand.clone());
        if cand < *slot {
            *slot = cand;
        }
    }
    let oracle: Vec<Option<String>> = entries
        .iter()
        .map(|e| {
            by_key
                .get(&(oracle_normalize(&e.artist_name), oracle_normalize(&e.title)))
                .map(|(_, id)| id.clone())
        })
        .collect();
    assert_eq!(got, oracle);
    let loosest = matched[&(0, 0)].len();
    let exact = got.iter().flatten().count();
    format!("500 entries, {loosest} matched at 0.5/0.5 down to {exact} at 1.0/1.0 = exact join")
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn lyricscope(args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_lyricscope"))
        .args(args)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "lyricscope {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn c10_determinism() -> String {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    let fx = root.join("fx");
    lyricscope(&["gen-fixture", "--out", fx.to_str().unwrap()]);
    let config = fx.join("lyricscope.toml");
    let mut reports = Vec::new();
    for run in ["run1", "run2"] {
        let out = root.join(run);
        lyricscope(&[
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "pipeline",
        ]);
        reports.push(snapshot(&out.join("report")));
    }
    assert!(
        reports[0].len() >= 5,
        "report has {} files",
        reports[0].len()
    );
    let names: Vec<_> = reports[0].keys().collect();
    assert_eq!(names, reports[1].keys().collect::<Vec<_>>());
    for (name, bytes) in &reports[0] {
        assert!(bytes == &reports[1][name], "{name} differs between runs");
    }
    format!(
        "{} report files byte-identical across two runs",
        reports[0].len()
    )
}

fn oracle_balance(
    first: &WordSet,
    second: &WordSet,
    tables: &[&FrequencyTable],
) -> Option<(Vec<String>, Vec<String>)> {
    let freq = |w: &str| tables.iter().map(|t| t.get(w)).min().unwrap();
    let kept =
        |s: &WordSet| -> Vec<String> { s.words.iter().filter(|w| freq(w) >= 5).cloned().collect() };
    let (mut a, mut b) = (kept(first), kept(second));
    if a.is_empty() || b.is_empty() {
        return None;
    }
    let target = a.len().min(b.len());
    for list in [&mut a, &mut b] {
        // Keep the `target` best-ranked words: frequent first, then alphabetical.
        let mut ranked = list.clone();
        ranked.sort_by(|x, y| freq(y).cmp(&freq(x)).then_with(|| x.cmp(y)));
        let keep: BTreeSet<String> = ranked.into_iter().take(target).collect();
        list.retain(|w| keep.contains(w));
    }
    Some((a, b))
}

fn c11_balancing() -> String {
    let sets = standard_word_sets();
    let find = |n: &str| sets.iter().find(|s| s.name == n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    let (mut checked, mut exhausted) = (0, 0);
    for round in 0..40 {
        let hi = if round % 4 == 0 { 7 } else { 14 };
        let tables: Vec<FrequencyTable> = (0..3)
            .map(|_| {
                let mut t = FrequencyTable::default();
                for s in &sets {
                    for w in &s.words {
                        t.add(w, rng.gen_range(0..hi));
                    }
                }
                t
            })
            .collect();
        let refs: Vec<&FrequencyTable> = tables.iter().collect();
        for &(a, b, x, y) in standard::BATTERY {
            for (p, q) in [(find(x), find(y)), (find(a), find(b))] {
                let got = balance_word_sets(p, q, &refs, MIN_WORD_FREQUENCY);
                match (got, oracle_balance(p, q, &refs)) {
                    (Ok((gp, gq)), Some((op, oq))) => {
                        assert_eq!(gp.words, op, "{} round {round}", p.name);
                        assert_eq!(gq.words, oq, "{} round {round}", q.name);
                        assert_eq!(gp.len(), gq.len());
                        checked += 1;
                    }
                    (Err(Error::SetExhausted(_)), None) => exhausted += 1,
                    (got, want) => panic!("{} / {}: {got:?} vs {want:?}", p.name, q.name),
                }
            }
        }
    }
    format!("{checked} balanced pairs and {exhausted} exhausted pairs match the oracle")
}

type Criterion = (&'static str, fn() -> String);

const CRITERIA: &[Criterion] = &[
    ("exact permutation oracle", c1_exact_permutation_oracle),
    ("hand-computed effect sizes", c2_hand_instances),
    ("antisymmetry", c3_antisymmetry),
    ("scale invariance", c4_scale_invariance),
    ("planted-bias recovery", c5_planted_bias),
    ("always-sexist baseline", c6_baseline),
    (
        "batching law and label monotonicity",
        c7_batching_and_labeling,
    ),
    ("dedup against all-pairs oracle", c8_dedup),
    ("matching monotonicity and exact join", c9_matching),
    ("pipeline determinism", c10_determinism),
    ("word-set balancing", c11_balancing),
];

fn main() {
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in CRITERIA.iter().enumerate() {
        match panic::catch_unwind(AssertUnwindSafe(check)) {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("criterion {:>2} {name}: FAIL ({msg})", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        CRITERIA.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
