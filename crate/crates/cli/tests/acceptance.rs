//! Acceptance gate for the toolkit.
//!
//! One test per shipped guarantee, ordered from structural exactness to the
//! Monte Carlo reproductions. Every tolerance is pinned next to its assert.
//! The heavy criteria print the measured numbers so a red run can be read
//! without re-running.

use qldpc_cli::manifest::build_family;
use qldpc_core::analog::{atd_decode, build_atg, build_multi_round, round_coupling_matrix};
use qldpc_core::codes::{surface_code_3d, CssCode};
use qldpc_core::decoder::{
    min_sum_decode, ssmsa_decode, DecoderConfig, OsdMethod, TannerGraph,
};
use qldpc_core::fit::{fit_threshold, FitPoint};
use qldpc_core::gf2::{BitVec, SparseBitMatrix};
use qldpc_core::noise::{
    p_from_sigma, prob_to_llr, sample_analog_syndrome, sigma_from_p, AnalogSyndrome,
    PauliChannel,
};
use qldpc_core::rng::{SampleRng, StreamTag};
use qldpc_core::sim::{
    combine_rates, word_error_rate, CapacityAlgorithm, CapacityScenario, QssScenario,
    RateEstimate, SingleShotScenario, WindowScenario,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn osd_config() -> DecoderConfig {
    DecoderConfig {
        osd: Some(OsdMethod::CombinationSweep),
        ..DecoderConfig::default()
    }
}

// ---------------------------------------------------------------------------
// Criterion 1: constructed code families have exactly the advertised
// parameters and satisfy the CSS and metacheck identities.
// ---------------------------------------------------------------------------

fn check_css_identities(code: &CssCode, label: &str) {
    let hz_t = code.hz.transpose();
    assert!(code.hx.mul_is_zero(&hz_t), "{label}: hx * hz^T != 0");
    if let Some(meta) = &code.meta_x {
        assert!(meta.mul_is_zero(&code.hx), "{label}: meta_x * hx != 0");
    }
    if let Some(meta) = &code.meta_z {
        assert!(meta.mul_is_zero(&code.hz), "{label}: meta_z * hz != 0");
    }
}

#[test]
fn criterion_1_code_construction_parameters() {
    for l in [2usize, 3, 4] {
        let (code, _) = build_family("toric3d", Some(l), None, true).unwrap();
        check_css_identities(&code, &format!("toric3d L={l}"));
        assert_eq!(code.n(), 3 * l * l * l, "toric3d L={l} block length");
        assert_eq!(code.k(), 3, "toric3d L={l} logical count");
        assert!(code.meta_x.is_some(), "toric3d L={l} carries metachecks");
    }

    let (open, _) = build_family("surface3d", Some(3), None, false).unwrap();
    check_css_identities(&open, "surface3d L=3");
    assert_eq!(open.n(), 51, "surface3d L=3 block length");
    assert_eq!(open.k(), 1, "surface3d L=3 logical count");

    for (base, n, k) in [
        ("n544k80", 544usize, 80usize),
        ("n714k100", 714, 100),
        ("n1020k136", 1020, 136),
    ] {
        let (code, _) = build_family("lp", None, Some(base), false).unwrap();
        check_css_identities(&code, base);
        assert_eq!(code.n(), n, "{base} block length");
        assert_eq!(code.k(), k, "{base} logical count");
    }
    println!("criterion 1: all code families exact");
}

// ---------------------------------------------------------------------------
// Criterion 2: the block-layout multi-round matrix equals the Kronecker
// construction exactly on 100 random sparse matrices for 1 to 5 rounds.
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_multi_round_layout_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_202);
    for _ in 0..100 {
        let rows = rng.gen_range(2..10usize);
        let cols = rng.gen_range(2..12usize);
        let entries: Vec<Vec<u32>> = (0..rows)
            .map(|_| {
                let degree = rng.gen_range(1..=cols.min(4));
                let mut row: Vec<u32> = (0..cols as u32).collect();
                for i in 0..degree {
                    let j = rng.gen_range(i..cols);
                    row.swap(i, j);
                }
                row.truncate(degree);
                row.sort_unstable();
                row
            })
            .collect();
        let h = SparseBitMatrix::from_rows(entries, cols).unwrap();
        let eye_m = SparseBitMatrix::identity(rows);
        for rounds in 1..=5usize {
            let aug = build_multi_round(&h, rounds);
            let oracle = SparseBitMatrix::identity(rounds)
                .kron(&h)
                .hstack(&round_coupling_matrix(rounds).kron(&eye_m))
                .unwrap();
            assert_eq!(aug.matrix().clone(), oracle, "rounds={rounds}");
        }
    }
    println!("criterion 2: block layout equals Kronecker form on 500 cases");
}

// ---------------------------------------------------------------------------
// Criterion 3: decoder oracles. Min-sum with no normalization is exact
// maximum-likelihood decoding on cycle-free codes; ordered statistics always
// satisfies the syndrome on augmented graphs; the soft-syndrome decoder at
// Gamma = 0 is bit-identical to hard min-sum.
// ---------------------------------------------------------------------------

struct TreeCode {
    h: SparseBitMatrix,
    label: &'static str,
}

fn tree_codes() -> Vec<TreeCode> {
    let path = SparseBitMatrix::from_rows(
        (0..5).map(|i| vec![i as u32, i as u32 + 1]).collect(),
        6,
    )
    .unwrap();

    // Seven checks chained through shared bits 0..=5; all but the middle
    // check also hold a private leaf bit, for n = 12.
    let caterpillar = SparseBitMatrix::from_rows(
        vec![
            vec![0, 6],
            vec![0, 1, 7],
            vec![1, 2, 8],
            vec![2, 3],
            vec![3, 4, 9],
            vec![4, 5, 10],
            vec![5, 11],
        ],
        12,
    )
    .unwrap();

    let star = SparseBitMatrix::from_rows(
        (0..4)
            .map(|c| vec![0u32, 1 + 2 * c, 2 + 2 * c])
            .collect(),
        9,
    )
    .unwrap();

    vec![
        TreeCode { h: path, label: "path n=6" },
        TreeCode { h: caterpillar, label: "caterpillar n=12" },
        TreeCode { h: star, label: "star n=9" },
    ]
}

fn syndrome_key(s: &BitVec) -> usize {
    s.ones().fold(0usize, |acc, i| acc | (1 << i))
}

#[test]
fn criterion_3_decoder_oracles() {
    // Part 1: exact maximum likelihood on trees, every syndrome.
    let mut rng = ChaCha8Rng::seed_from_u64(30_303);
    let config = DecoderConfig {
        alpha: 1.0,
        max_iter: 60,
        osd: None,
        ..DecoderConfig::default()
    };
    for tree in tree_codes() {
        let n = tree.h.cols();
        let m = tree.h.rows();
        let priors: Vec<f64> = (0..n)
            .map(|_| prob_to_llr(rng.gen_range(0.02..0.2)))
            .collect();
        let mut best = vec![f64::INFINITY; 1 << m];
        for word in 0..(1u32 << n) {
            let bits: Vec<usize> =
                (0..n).filter(|&b| word & (1 << b) != 0).collect();
            let error = BitVec::from_indices(n, &bits);
            let cost: f64 = bits.iter().map(|&b| priors[b]).sum();
            let key = syndrome_key(&tree.h.matvec(&error));
            if cost < best[key] {
                best[key] = cost;
            }
        }
        let graph = TannerGraph::new(&tree.h);
        for key in 0..(1usize << m) {
            let bits: Vec<usize> =
                (0..m).filter(|&c| key & (1 << c) != 0).collect();
            let syndrome = BitVec::from_indices(m, &bits);
            let result = min_sum_decode(&graph, &priors, &syndrome, &config);
            assert!(result.converged, "{}: syndrome {key} unmatched", tree.label);
            assert_eq!(
                syndrome_key(&tree.h.matvec(&result.estimate)),
                key,
                "{}: syndrome {key} mismatched",
                tree.label
            );
            let cost: f64 = result.estimate.ones().map(|b| priors[b]).sum();
            assert!(
                (cost - best[key]).abs() <= 1e-9,
                "{}: syndrome {key} cost {cost} vs ML {}",
                tree.label,
                best[key]
            );
        }
    }

    // Part 2: ordered statistics always satisfies the syndrome on augmented
    // graphs, whose rows always span the syndrome space.
    let mut rng = ChaCha8Rng::seed_from_u64(30_304);
    let config = osd_config();
    for trial in 0..10_000 {
        let rows = rng.gen_range(4..18usize);
        let cols = rng.gen_range(rows..rows + 16);
        let entries: Vec<Vec<u32>> = (0..rows)
            .map(|_| {
                let degree = rng.gen_range(1..=cols.min(5));
                let mut row: Vec<u32> = (0..cols as u32).collect();
                for i in 0..degree {
                    let j = rng.gen_range(i..cols);
                    row.swap(i, j);
                }
                row.truncate(degree);
                row.sort_unstable();
                row
            })
            .collect();
        let h = SparseBitMatrix::from_rows(entries, cols).unwrap();
        let atg = build_atg(&h);
        let values: Vec<f64> = (0..rows)
            .map(|_| {
                let mag = rng.gen_range(0.05..1.5);
                if rng.gen_bool(0.5) {
                    mag
                } else {
                    -mag
                }
            })
            .collect();
        let analog = AnalogSyndrome::new(values, 0.4);
        let hard = analog.hard();
        let prior = prob_to_llr(rng.gen_range(0.01..0.2));
        let outcome = atd_decode(&atg, prior, &analog, &config);
        assert!(outcome.decode.satisfied, "trial {trial} left unsatisfied");
        assert_eq!(
            atg.matrix().matvec(&outcome.decode.estimate),
            hard,
            "trial {trial} estimate misses the syndrome"
        );
    }

    // Part 3: the soft-syndrome decoder with Gamma = 0 reproduces hard
    // min-sum bit for bit.
    let mut rng = ChaCha8Rng::seed_from_u64(30_305);
    let config = DecoderConfig {
        gamma: 0.0,
        osd: None,
        ..DecoderConfig::default()
    };
    for trial in 0..1_000 {
        let rows = rng.gen_range(3..14usize);
        let cols = rng.gen_range(rows..rows + 12);
        let entries: Vec<Vec<u32>> = (0..rows)
            .map(|_| {
                let degree = rng.gen_range(2..=cols.min(5));
                let mut row: Vec<u32> = (0..cols as u32).collect();
                for i in 0..degree {
                    let j = rng.gen_range(i..cols);
                    row.swap(i, j);
                }
                row.truncate(degree);
                row.sort_unstable();
                row
            })
            .collect();
        let h = SparseBitMatrix::from_rows(entries, cols).unwrap();
        let graph = TannerGraph::new(&h);
        let priors: Vec<f64> = (0..cols)
            .map(|_| prob_to_llr(rng.gen_range(0.02..0.3)))
            .collect();
        let sigma = 0.6;
        let values: Vec<f64> = (0..rows)
            .map(|_| {
                let mag = rng.gen_range(0.05..1.5);
                if rng.gen_bool(0.5) {
                    mag
                } else {
                    -mag
                }
            })
            .collect();
        let analog = AnalogSyndrome::new(values.clone(), sigma);
        let syndrome_llrs: Vec<f64> =
            values.iter().map(|&v| 2.0 * v / (sigma * sigma)).collect();
        let soft = ssmsa_decode(&graph, &priors, &syndrome_llrs, &config);
        let hard = min_sum_decode(&graph, &priors, &analog.hard(), &config);
        assert_eq!(
            soft.decode.estimate, hard.estimate,
            "trial {trial} estimates diverge"
        );
        assert_eq!(
            soft.decode.iterations, hard.iterations,
            "trial {trial} iteration counts diverge"
        );
    }
    println!("criterion 3: ML equivalence, OSD satisfiability, Gamma=0 identity");
}

// ---------------------------------------------------------------------------
// Criterion 4: the analog noise model matches the binary channel it encodes.
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_noise_model_equivalence() {
    let steps = 400usize;
    let (lo, hi) = (1e-4f64, 0.49f64);
    for i in 0..=steps {
        let t = i as f64 / steps as f64;
        let p = lo * (hi / lo).powf(t);
        let back = p_from_sigma(sigma_from_p(p));
        assert!(
            (back - p).abs() <= 1e-10,
            "round trip at p={p}: {back}"
        );
    }

    let n = 100_000usize;
    let zeros = BitVec::zeros(n);
    for (stream, &p) in [0.01f64, 0.05, 0.1, 0.25].iter().enumerate() {
        let sigma = sigma_from_p(p);
        let mut rng = SampleRng::new(40_404, stream as u64, StreamTag::SyndromeX);
        let analog = sample_analog_syndrome(&zeros, sigma, &mut rng);
        let flips = analog.hard().weight() as f64;
        let bound = 3.0 * (n as f64 * p * (1.0 - p)).sqrt();
        assert!(
            (flips - n as f64 * p).abs() <= bound,
            "thresholded Gaussian at p={p}: {flips} flips vs {} expected",
            n as f64 * p
        );
    }
    println!("criterion 4: sigma/p round trip and thresholded sampling agree");
}

// ---------------------------------------------------------------------------
// Criterion 5: joint analog decoding beats soft-syndrome decoding on the
// [[544, 80]] lifted-product code across readout noise levels, decisively at
// sigma = 0.4.
// ---------------------------------------------------------------------------

const C5_SAMPLES: u64 = 10_000;
const C5_SEED: u64 = 71;

fn capacity_rate(
    code: &CssCode,
    sigma: f64,
    algorithm: CapacityAlgorithm,
) -> RateEstimate {
    let scenario = CapacityScenario::new(
        code,
        PauliChannel::depolarizing(0.05),
        sigma,
        algorithm,
        osd_config(),
    );
    let mut failures = 0u64;
    for index in 0..C5_SAMPLES {
        let out = scenario.sample(C5_SEED, index);
        if out.x_error_failed || out.z_error_failed {
            failures += 1;
        }
    }
    RateEstimate { failures, samples: C5_SAMPLES }
}

#[test]
fn criterion_5_analog_beats_soft_syndrome_decoding() {
    let (code, _) = build_family("lp", None, Some("n544k80"), false).unwrap();
    let k = code.k();
    let mut gaps = Vec::new();
    let mut bars = Vec::new();
    for &sigma in &[0.1f64, 0.2, 0.3, 0.4] {
        let atd = capacity_rate(&code, sigma, CapacityAlgorithm::AnalogTanner);
        let ssmsa = capacity_rate(&code, sigma, CapacityAlgorithm::SoftSyndrome);
        let wer_atd = atd.word_error_rate(k);
        let wer_ssmsa = ssmsa.word_error_rate(k);
        println!(
            "criterion 5: sigma={sigma} wer_atd={wer_atd:.5} wer_ssmsa={wer_ssmsa:.5}"
        );
        assert!(
            wer_atd <= wer_ssmsa,
            "sigma={sigma}: joint decoding lost ({wer_atd} > {wer_ssmsa})"
        );
        gaps.push(wer_ssmsa - wer_atd);
        bars.push((
            wer_atd + atd.word_error_bar(k),
            wer_ssmsa - ssmsa.word_error_bar(k),
        ));
    }
    assert!(
        gaps[3] > gaps[2],
        "gap fails to widen at sigma=0.4: {gaps:?}"
    );
    let (atd_high, ssmsa_low) = bars[3];
    assert!(
        atd_high < ssmsa_low,
        "error bars overlap at sigma=0.4: {atd_high} vs {ssmsa_low}"
    );
}

// ---------------------------------------------------------------------------
// Criterion 6: the single-shot threshold plateaus near 10% as the number of
// noisy rounds grows, and never increases with deeper histories.
// ---------------------------------------------------------------------------

const C6_SIZES: [usize; 3] = [3, 5, 7];
const C6_SAMPLES: u64 = 2_500;
const C6_SEED: u64 = 61;
const C6_GRIDS: [(usize, [f64; 6]); 4] = [
    (1, [0.145, 0.153, 0.161, 0.169, 0.177, 0.185]),
    (2, [0.105, 0.112, 0.119, 0.126, 0.133, 0.140]),
    (4, [0.096, 0.103, 0.110, 0.117, 0.124, 0.131]),
    (8, [0.090, 0.096, 0.102, 0.108, 0.114, 0.120]),
];

#[test]
fn criterion_6_single_shot_threshold_plateau() {
    let codes: Vec<(usize, CssCode)> = C6_SIZES
        .iter()
        .map(|&l| (l, surface_code_3d(l, true)))
        .collect();
    let mut fitted = Vec::new();
    for (rounds, grid) in C6_GRIDS {
        let mut points = Vec::new();
        for (l, code) in &codes {
            for &p in &grid {
                let scenario = SingleShotScenario::new(
                    code,
                    p,
                    sigma_from_p(p),
                    rounds,
                    osd_config(),
                );
                let failures = (0..C6_SAMPLES)
                    .filter(|&i| scenario.sample(C6_SEED, i).failed)
                    .count() as u64;
                let est = RateEstimate { failures, samples: C6_SAMPLES };
                points.push(FitPoint {
                    p,
                    size: *l,
                    rate: est.rate(),
                    err: est.std_err(),
                });
            }
        }
        let fit = fit_threshold(&points).expect("threshold fit");
        println!(
            "criterion 6: rounds={rounds} p_th={:.4} mu={:.2}",
            fit.p_th, fit.mu
        );
        fitted.push((rounds, fit.p_th));
    }
    let deepest = fitted.last().unwrap().1;
    assert!(
        (0.080..=0.115).contains(&deepest),
        "p_th at 8 rounds out of range: {deepest}"
    );
    for pair in fitted.windows(2) {
        assert!(
            pair[1].1 <= pair[0].1 + 0.005,
            "threshold grew with rounds: {fitted:?}"
        );
    }
}

// ---------------------------------------------------------------------------
// Criterion 7: on the side without metachecks, analog virtual priors beat a
// flat channel prior, with both thresholds in the expected band.
// ---------------------------------------------------------------------------

const C7_SIZES: [usize; 2] = [3, 5];
const C7_GRID: [f64; 6] = [0.010, 0.012, 0.014, 0.016, 0.018, 0.020];
const C7_SAMPLES: u64 = 1_500;
const C7_SEED: u64 = 72;

fn window_threshold(codes: &[(usize, CssCode)], analog: bool) -> f64 {
    let mut points = Vec::new();
    for (l, code) in codes {
        for &p in &C7_GRID {
            let sigma = sigma_from_p(p);
            let prior = if analog {
                qldpc_core::analog::VirtualPrior::Analog
            } else {
                qldpc_core::analog::VirtualPrior::Fixed(prob_to_llr(p))
            };
            let scenario = WindowScenario::new(
                code,
                p,
                sigma,
                2 * l + 1,
                *l,
                prior,
                osd_config(),
            );
            let failures = (0..C7_SAMPLES)
                .filter(|&i| scenario.sample(C7_SEED, i).failed)
                .count() as u64;
            let est = RateEstimate { failures, samples: C7_SAMPLES };
            points.push(FitPoint {
                p,
                size: *l,
                rate: est.rate(),
                err: est.std_err(),
            });
        }
    }
    fit_threshold(&points).expect("threshold fit").p_th
}

#[test]
fn criterion_7_analog_priors_beat_hard_priors() {
    let codes: Vec<(usize, CssCode)> = C7_SIZES
        .iter()
        .map(|&l| (l, surface_code_3d(l, true)))
        .collect();
    let analog = window_threshold(&codes, true);
    let hard = window_threshold(&codes, false);
    println!("criterion 7: analog p_th={analog:.4} hard p_th={hard:.4}");
    assert!(
        analog > hard,
        "analog priors did not beat hard priors: {analog} vs {hard}"
    );
    for (name, value) in [("analog", analog), ("hard", hard)] {
        assert!(
            (0.010..=0.022).contains(&value),
            "{name} threshold out of band: {value}"
        );
    }
}

// ---------------------------------------------------------------------------
// Criterion 8: quasi-single-shot decoding with a short window tracks the
// full-distance window, while a unit window breaks down.
// ---------------------------------------------------------------------------

const C8_SAMPLES: u64 = 10_000;
const C8_SEED: u64 = 81;
const C8_NOISY_ROUNDS: usize = 24;

fn qss_rate(code: &CssCode, window: usize) -> RateEstimate {
    let p = 0.005;
    let scenario = QssScenario::new(
        code,
        PauliChannel::bit_flip(p),
        sigma_from_p(p),
        window,
        C8_NOISY_ROUNDS,
        osd_config(),
    );
    let mut failures = 0u64;
    for index in 0..C8_SAMPLES {
        if scenario.sample(C8_SEED, index).failed() {
            failures += 1;
        }
    }
    RateEstimate { failures, samples: C8_SAMPLES }
}

#[test]
fn criterion_8_qss_window_scaling() {
    let code = surface_code_3d(5, true);
    let k = code.k();
    let wer: Vec<f64> = [1usize, 3, 5]
        .iter()
        .map(|&w| {
            let est = qss_rate(&code, w);
            let wer = est.word_error_rate(k);
            println!(
                "criterion 8: w={w} failures={} wer={wer:.5}",
                est.failures
            );
            wer
        })
        .collect();
    assert!(
        wer[1] <= 2.0 * wer[2],
        "w=3 does not track w=5: {} vs {}",
        wer[1],
        wer[2]
    );
    assert!(
        wer[0] >= 5.0 * wer[1],
        "w=1 does not break down: {} vs {}",
        wer[0],
        wer[1]
    );
}

// ---------------------------------------------------------------------------
// Criterion 9: the statistics layer matches its closed forms and the
// threshold fitter recovers planted parameters.
// ---------------------------------------------------------------------------

#[test]
fn criterion_9_statistics_closed_forms() {
    assert!((word_error_rate(0.1, 1) - 0.1).abs() <= 1e-12);
    assert_eq!(word_error_rate(0.0, 7), 0.0);
    assert!((word_error_rate(0.271, 3) - 0.1).abs() <= 1e-9);

    let est = RateEstimate { failures: 100, samples: 1000 };
    assert!((est.rate() - 0.1).abs() <= 1e-12);
    assert!((est.std_err() - (0.1f64 * 0.9 / 1000.0).sqrt()).abs() <= 1e-12);

    let (p, e) = combine_rates(0.3, 0.0, 0.0, 0.0);
    assert!((p - 0.3).abs() <= 1e-12 && e == 0.0);
    let (p, _) = combine_rates(0.5, 0.0, 0.5, 0.0);
    assert!((p - 0.75).abs() <= 1e-12);
    let (ab, eab) = combine_rates(0.01, 0.001, 0.02, 0.002);
    let (ba, eba) = combine_rates(0.02, 0.002, 0.01, 0.001);
    assert!((ab - ba).abs() <= 1e-15 && (eab - eba).abs() <= 1e-15);
    let expected =
        (0.001f64.powi(2) * 0.998f64.powi(2) + 0.002f64.powi(2) * 0.999f64.powi(2)).sqrt();
    assert!((eab - expected).abs() <= 1e-15);

    let planted_p = 0.032;
    let planted_mu = 1.4;
    let quadratic = [0.15, 1.8, 5.0];
    let mut points = Vec::new();
    for &size in &[4usize, 6, 8] {
        for step in -5i32..=5 {
            let p = planted_p * (1.0 + 0.05 * f64::from(step));
            let x = (p - planted_p) * (size as f64).powf(1.0 / planted_mu);
            let rate = quadratic[0] + quadratic[1] * x + quadratic[2] * x * x;
            points.push(FitPoint { p, size, rate, err: 0.004 });
        }
    }
    let fit = fit_threshold(&points).unwrap();
    assert!(
        (fit.p_th - planted_p).abs() <= 0.002,
        "planted threshold missed: {}",
        fit.p_th
    );
    assert!(
        (fit.mu - planted_mu).abs() <= 0.2,
        "planted exponent missed: {}",
        fit.mu
    );
    println!("criterion 9: closed forms and synthetic fit recovery hold");
}
