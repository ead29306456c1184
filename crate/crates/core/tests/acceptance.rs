//! End-to-end acceptance checks. Runs every criterion, prints one line per
//! criterion and exits non-zero if any of them fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use hammersley::*;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;

type Check = fn() -> Result<String, String>;

fn k(k: u8) -> Alphabet {
    Alphabet::new(k).unwrap()
}

fn w(s: &str) -> Word {
    Word::parse(s).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Every word of length `n` over the given letters, visited in place.
fn for_each_word(n: usize, letters: &[Letter], mut f: impl FnMut(&Word)) {
    let mut idx = vec![0usize; n];
    loop {
        f(&Word::from_letters(
            idx.iter().map(|&i| letters[i]).collect(),
        ));
        let mut p = n;
        loop {
            if p == 0 {
                return;
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < letters.len() {
                break;
            }
            idx[p] = 0;
        }
    }
}

fn digits(k: Alphabet) -> Vec<Letter> {
    k.digits().collect()
}

fn with_diamond(k: Alphabet) -> Vec<Letter> {
    let mut l = digits(k);
    l.push(Letter::Diamond);
    l
}

/// Random word that stays dominant while extending, except for an
/// occasional uniformly drawn letter.
fn guided_word<R: Rng>(rng: &mut R, n: usize, k: Alphabet, noise: f64) -> Word {
    let mut word = Word::new();
    for _ in 0..n {
        let uniform = Letter::Digit(rng.random_range(0..=k.k()));
        let mut next = word.clone();
        next.push(uniform);
        if rng.random_bool(noise) || is_k_dominant(&next, k).unwrap() {
            word = next;
        } else {
            word.push(k.top());
        }
    }
    word
}

const F1_TABLE: &[(&str, u32)] = &[
    ("1", 1),
    ("10", 1),
    ("11", 1),
    ("100", 1),
    ("101", 2),
    ("110", 2),
    ("111", 1),
    ("1000", 1),
    ("1001", 3),
    ("1010", 5),
    ("1011", 3),
    ("1100", 5),
    ("1101", 3),
    ("1110", 3),
    ("1111", 1),
];

const F2_TABLE: &[(&str, u32)] = &[
    ("2", 1),
    ("21", 1),
    ("22", 1),
    ("211", 1),
    ("212", 2),
    ("220", 1),
    ("221", 1),
    ("222", 1),
    ("2111", 1),
    ("2112", 3),
    ("2120", 2),
    ("2121", 3),
    ("2122", 3),
    ("2201", 1),
    ("2202", 3),
    ("2210", 1),
    ("2211", 1),
    ("2212", 2),
    ("2220", 2),
    ("2221", 1),
    ("2222", 1),
];

/// Printed means of the increment count for n = 2..10.
const INCREMENT_MEANS: &[(usize, &str)] = &[
    (2, "1.0"),
    (3, "1.166"),
    (4, "1.208"),
    (5, "1.250"),
    (6, "1.281"),
    (7, "1.307"),
    (8, "1.329"),
    (9, "1.347"),
    (10, "1.363"),
];

fn table_check(table: &[(&str, u32)], kk: u8) -> Result<(), String> {
    for &(s, expected) in table {
        let got = multiplicity(&w(s), k(kk)).map_err(|e| e.to_string())?;
        ensure(got == BigUint::from(expected), || {
            format!("F_{kk}({s}) = {got}, expected {expected}")
        })?;
    }
    Ok(())
}

fn c1() -> Result<String, String> {
    table_check(F1_TABLE, 1)?;
    Ok(format!("{} values exact", F1_TABLE.len()))
}

fn c2() -> Result<String, String> {
    table_check(F2_TABLE, 2)?;
    let listed: BTreeSet<Word> = F2_TABLE.iter().map(|(s, _)| w(s)).collect();
    let mut zeros = 0;
    for n in 1..=4 {
        for_each_word(n, &digits(k(2)), |word| {
            if !listed.contains(word) {
                assert!(
                    !is_k_dominant(word, k(2)).unwrap(),
                    "{word} is dominant but unlisted"
                );
                assert!(
                    multiplicity(word, k(2)).unwrap().is_zero(),
                    "F_2({word}) != 0"
                );
                zeros += 1;
            }
        });
    }
    Ok(format!(
        "{} values exact, {zeros} other words give 0",
        F2_TABLE.len()
    ))
}

fn c3() -> Result<String, String> {
    for kk in 1..=3 {
        let memo = MemoStore::new();
        for n in 1..=10 {
            let expected = factorial(n);
            let reverse: BigUint = dominant_words(n, k(kk))
                .iter()
                .map(|word| multiplicity_with(word, k(kk), &memo).unwrap())
                .sum();
            ensure(reverse == expected, || {
                format!("k={kk} n={n}: reverse sum {reverse} != {expected}")
            })?;
            let forward = series_table(n, k(kk)).map_err(|e| e.to_string())?.mass();
            ensure(forward == expected, || {
                format!("k={kk} n={n}: forward sum {forward} != {expected}")
            })?;
        }
    }
    Ok("sums equal n! for k=1..3, n=1..10".into())
}

fn c4() -> Result<String, String> {
    let mut words = 0;
    for kk in 1..=3 {
        for n in 1..=7 {
            let literal =
                had_enumerate(n, k(kk), Enumeration::Trajectories).map_err(|e| e.to_string())?;
            let dp = had_enumerate(n, k(kk), Enumeration::LevelDp).map_err(|e| e.to_string())?;
            ensure(literal.diff(&dp).is_empty(), || {
                format!("k={kk} n={n}: level DP disagrees with trajectory enumeration")
            })?;
            for word in dominant_words(n, k(kk)) {
                let f = multiplicity_unmemoized(&word, k(kk)).unwrap();
                ensure(f == literal.get(&word), || {
                    format!("k={kk} {word}: F = {f}, enumeration {}", literal.get(&word))
                })?;
                words += 1;
            }
        }
    }
    let f = |s: &str| multiplicity(&w(s), k(2)).unwrap();
    let enumerated = had_enumerate(6, k(2), Enumeration::Trajectories)
        .unwrap()
        .get(&w("222200"));
    let target = f("222200");
    let parts = f("22210") + f("22201") + f("22200");
    ensure(
        target == enumerated && target == parts && !target.is_zero(),
        || format!("F_2(222200) = {target}, enumeration {enumerated}, predecessors {parts}"),
    )?;
    Ok(format!("{words} words agree; F_2(222200) = {target}"))
}

fn digits_of(r: &BigRational, places: usize, truncate: bool) -> String {
    if truncate {
        let scale = BigRational::from_integer(num_bigint::BigInt::from(10u32).pow(places as u32));
        let t = (r * &scale).floor() / scale;
        decimal_string(&t, places as u32)
    } else {
        decimal_string(r, places as u32)
    }
}

fn c5() -> Result<String, String> {
    let mut rounded = 0;
    let mut truncated = 0;
    for &(n, printed) in INCREMENT_MEANS {
        let exact = expected_increments(n, k(2)).map_err(|e| e.to_string())?;
        let places = printed.split('.').nth(1).map_or(0, str::len);
        if digits_of(&exact, places, false) == printed {
            rounded += 1;
        } else if digits_of(&exact, places, true) == printed {
            truncated += 1;
        } else {
            return Err(format!("n={n}: exact {exact} does not give {printed}"));
        }
    }
    let e3 = expected_increments(3, k(2)).unwrap();
    let e4 = expected_increments(4, k(2)).unwrap();
    let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    ensure(e3 == q(7, 6) && e4 == q(29, 24), || {
        format!("n=3 {e3}, n=4 {e4}")
    })?;
    Ok(format!(
        "{rounded} rounded and {truncated} truncated matches; n=3 {e3}, n=4 {e4}"
    ))
}

fn c6() -> Result<String, String> {
    let mut total = 0usize;
    for kk in 1..=3 {
        for n in 1..=10 {
            let table = series_table(n, k(kk)).map_err(|e| e.to_string())?;
            let support: BTreeSet<&Word> = table.support().collect();
            let mut dominant = 0usize;
            for_each_word(n, &digits(k(kk)), |word| {
                let d = is_k_dominant(word, k(kk)).unwrap();
                assert_eq!(d, support.contains(word), "k={kk} {word}");
                dominant += usize::from(d);
            });
            ensure(dominant == support.len(), || format!("k={kk} n={n}"))?;
            total += dominant;
        }
    }
    Ok(format!(
        "{total} dominant words, all with F > 0 and no others"
    ))
}

fn c7() -> Result<String, String> {
    let mut exhaustive = 0usize;
    for kk in [2, 3] {
        for n in 1..=10 {
            for_each_word(n, &digits(k(kk)), |word| {
                let pda = pda_run(word, k(kk)).unwrap().accepted;
                assert_eq!(pda, accept_dominant(word, k(kk)).unwrap(), "k={kk} {word}");
                exhaustive += 1;
            });
        }
    }
    let mut rng = substream(DEFAULT_SEED, 7);
    let mut accepted = 0;
    for _ in 0..100_000 {
        let kk = k(rng.random_range(2..=3));
        let n = rng.random_range(11..=200);
        let word = if rng.random_bool(0.5) {
            guided_word(&mut rng, n, kk, 0.002)
        } else {
            Word::from_letters(
                (0..n)
                    .map(|_| Letter::Digit(rng.random_range(0..=kk.k())))
                    .collect(),
            )
        };
        let pda = pda_run(&word, kk).unwrap().accepted;
        ensure(pda == accept_dominant(&word, kk).unwrap(), || {
            format!("{word}")
        })?;
        accepted += usize::from(pda);
    }
    Ok(format!(
        "{exhaustive} exhaustive words and 100000 random words agree ({accepted} accepted)"
    ))
}

fn c8() -> Result<String, String> {
    let mut checked = 0usize;
    for kk in 1..=2 {
        let tables: Vec<SeriesTable> = (1..=4)
            .map(|n| interval_enumerate(n, k(kk), Enumeration::Trajectories).unwrap())
            .collect();
        for (i, table) in tables.iter().enumerate() {
            let n = i + 1;
            let dp = interval_enumerate(n, k(kk), Enumeration::LevelDp).unwrap();
            ensure(table.diff(&dp).is_empty(), || {
                format!("k={kk} n={n}: DP mismatch")
            })?;
            let odd: BigUint = (1..=2 * n as u64 - 1).step_by(2).product();
            ensure(table.mass() == &odd * &odd, || {
                format!("k={kk} n={n}: mass {} != {}", table.mass(), &odd * &odd)
            })?;
        }
        for len in 1..=8 {
            let table = (len % 2 == 0).then(|| &tables[len / 2 - 1]);
            for_each_word(len, &with_diamond(k(kk)), |word| {
                let reachable = table.is_some_and(|t| !t.get(word).is_zero());
                assert_eq!(
                    accept_interval(word, k(kk)).unwrap(),
                    reachable,
                    "k={kk} {word}"
                );
                checked += 1;
            });
        }
    }
    let m2 = interval_enumerate(2, k(2), Enumeration::Trajectories)
        .unwrap()
        .mass();
    let m3 = interval_enumerate(3, k(2), Enumeration::Trajectories)
        .unwrap()
        .mass();
    ensure(m2 == 9u32.into() && m3 == 225u32.into(), || {
        format!("masses {m2}, {m3}")
    })?;
    Ok(format!(
        "{checked} words agree; masses 9, 225, 11025 at n=2..4"
    ))
}

fn c9() -> Result<String, String> {
    for kk in 1..=2 {
        for n in 1..=6 {
            let table = interval_table(n, k(kk)).map_err(|e| e.to_string())?;
            let projected: BTreeSet<Word> = table.support().map(delete_diamonds).collect();
            let dominant: BTreeSet<Word> = dominant_words(n, k(kk)).into_iter().collect();
            ensure(projected == dominant, || {
                format!(
                    "k={kk} n={n}: {} projected words vs {} dominant",
                    projected.len(),
                    dominant.len()
                )
            })?;
        }
    }
    Ok("projections equal the dominant words for k=1,2 and n=1..6".into())
}

fn c10() -> Result<String, String> {
    let mut shapes = 0;
    let mut members = 0;
    for kk in 1..=3 {
        let a = k(kk);
        for total in 0..=10 {
            for alpha in 0..=total {
                for beta in 0..=total - alpha {
                    for gamma in 0..=total - alpha - beta {
                        let delta = total - alpha - beta - gamma;
                        let mut letters = vec![a.top(); alpha];
                        letters.extend(std::iter::repeat_n(Letter::Diamond, beta));
                        letters.extend(std::iter::repeat_n(Letter::Digit(kk - 1), gamma));
                        letters.extend(std::iter::repeat_n(Letter::Diamond, delta));
                        let word = Word::from_letters(letters);
                        let decomposed = sk_decompose(&word, a);
                        let accepted = accept_interval(&word, a).unwrap();
                        ensure(decomposed.is_some() == accepted, || {
                            format!("k={kk} ({alpha},{beta},{gamma},{delta}): {decomposed:?} vs {accepted}")
                        })?;
                        if let Some(d) = decomposed {
                            ensure(d.word(a) == word, || {
                                format!("{d:?} does not rebuild {word}")
                            })?;
                        }
                        shapes += 1;
                        members += usize::from(accepted);
                    }
                }
            }
        }
    }
    Ok(format!("{shapes} shapes, {members} members"))
}

fn c11() -> Result<String, String> {
    let memo = MemoStore::new();
    let mut checked = 0;
    for n in 1..=10 {
        for_each_word(n, &digits(k(1)), |word| {
            let f = multiplicity_with(word, k(1), &memo).unwrap();
            match RunLengthWord::encode(word) {
                Ok(rl) => assert_eq!(f1_runlength(&rl), f, "{word}"),
                Err(_) => assert!(f.is_zero(), "{word}"),
            }
            checked += 1;
        });
    }
    Ok(format!("{checked} binary words agree"))
}

fn c12() -> Result<String, String> {
    let mut rng = substream(DEFAULT_SEED, 12);
    let mut lengths = BTreeSet::new();
    for _ in 0..1000 {
        let kk = k(rng.random_range(1..=3));
        let n = rng.random_range(1..=12);
        let word = guided_word(&mut rng, n, kk, 0.0);
        let t = witness_trajectory(&word, kk).map_err(|e| e.to_string())?;
        let replayed = had_replay(&t, kk).map_err(|e| e.to_string())?;
        ensure(replayed == word, || format!("{word} replays to {replayed}"))?;
        lengths.insert(n);
    }
    Ok(format!(
        "1000 witnesses replay exactly, lengths {:?}",
        lengths
    ))
}

const SCALING_N: usize = 100_000;
const SCALING_SAMPLES: u64 = 10_000;

fn scaling() -> (IncrementDistribution, ScalingEstimate) {
    let d = sampled_increment_distribution(
        SCALING_N,
        k(2),
        SCALING_SAMPLES,
        DEFAULT_SEED,
        Execution::default(),
    )
    .unwrap();
    let est = ScalingEstimate::from_distribution(&d);
    (d, est)
}

fn c13() -> Result<String, String> {
    let (d, est) = scaling();
    let residuals = geometric_residuals(&d.pmf(), P_STAR, 6);
    let worst = residuals.iter().map(|&(_, r)| r).fold(0.0, f64::max);
    let summary = format!(
        "n={SCALING_N} samples={SCALING_SAMPLES} mean {:.4} ± {:.4}, max residual {worst:.4}",
        est.lambda_hat,
        est.half_width.unwrap()
    );
    ensure((1.555..=1.595).contains(&est.lambda_hat), || {
        summary.clone()
    })?;
    ensure(worst <= 0.02, || summary.clone())?;
    Ok(summary)
}

fn c14() -> Result<String, String> {
    let (_, est) = scaling();
    let gap = est.gap_to_phi();
    let summary = format!(
        "lambda_hat {:.4}, phi {:.4}, gap {gap:.4}",
        est.lambda_hat, est.phi
    );
    ensure(
        (PHI - 1.6180).abs() < 5e-5 && (0.02..=0.06).contains(&gap),
        || summary.clone(),
    )?;
    Ok(summary)
}

fn main() {
    let criteria: &[(&str, Check, Option<Duration>)] = &[
        ("F_1 table", c1, Some(Duration::from_secs(1))),
        ("F_2 table", c2, Some(Duration::from_secs(1))),
        ("mass conservation", c3, Some(Duration::from_secs(60))),
        (
            "reverse moves vs enumeration",
            c4,
            Some(Duration::from_secs(60)),
        ),
        (
            "mean increments, small n",
            c5,
            Some(Duration::from_secs(60)),
        ),
        ("support is the dominant set", c6, None),
        ("counter automaton", c7, None),
        ("interval language", c8, None),
        ("interval projection", c9, None),
        ("S_k slice", c10, None),
        ("F_1 run-length recurrence", c11, None),
        ("witness trajectories", c12, None),
        ("sampled scaling", c13, None),
        ("gap to the golden ratio", c14, None),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(msg)
        });
        let elapsed = start.elapsed();
        let outcome = match (outcome, budget) {
            (Ok(_), Some(b)) if elapsed > *b => Err(format!("took {elapsed:.2?}, budget {b:?}")),
            (o, _) => o,
        };
        let (status, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {:>2} {status} [{elapsed:.2?}] {name}: {detail}",
            i + 1
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
