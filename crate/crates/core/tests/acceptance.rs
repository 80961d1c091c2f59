//! One pass/fail line per acceptance criterion. Exits non-zero when any
//! criterion fails.

use std::time::{Duration, Instant};

use chrono::{Duration as ChronoDuration, TimeZone, Timelike, Utc};
use pfbound::baseline::Station;
use pfbound::bound::{evaluate_series, extract_bound, localization_ceiling, v_qi_min_boosted, QiSpeed};
use pfbound::celestial::{EquatorialDirection, OrbitalConstants};
use pfbound::config::{self, Document};
use pfbound::fringe::{detect_collapse, expected_counts, injected_intervals, simulate, InfluenceHypothesis, InfluenceSpeed};
use pfbound::record::{ExperimentRecord, FrameSpec, RecordSpec};
use pfbound::runner::{self, LoadedConfig};
use pfbound::scan::{scan, FrameGrid};
use pfbound::SPEED_OF_LIGHT as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FIXTURE: &str = include_str!("../fixtures/geneva_1999.cfg");

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn loaded() -> LoadedConfig {
    LoadedConfig::from_text(FIXTURE).expect("fixture parses")
}

fn criterion_1() -> Outcome {
    let rec = loaded().record;
    let clock = Instant::now();
    let series = evaluate_series(&rec, 10.0).unwrap();
    let elapsed = clock.elapsed();
    let target = Utc.with_ymd_and_hms(1999, 6, 2, 3, 0, 0).unwrap();
    let times: Vec<_> = series
        .crossings
        .iter()
        .map(|&t| rec.start() + ChronoDuration::milliseconds((t * 1e3) as i64))
        .collect();
    let within = times.len() == 1 && (times[0] - target).num_seconds().abs() <= 45 * 60;
    outcome(
        within && elapsed < Duration::from_secs(1),
        format!(
            "{} crossing(s) at {:?}, runtime {:.3} s",
            times.len(),
            times.iter().map(|t| format!("{:02}:{:02}:{:02} UTC", t.hour(), t.minute(), t.second())).collect::<Vec<_>>(),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    let rec = loaded().record;
    let series = evaluate_series(&rec, 10.0).unwrap();
    let bound = extract_bound(&series, 3600.0).unwrap() / C;
    let ratio = bound / 1.5e4;
    outcome(
        (0.5..=2.0).contains(&ratio),
        format!("bound {bound:.6e} c, ratio to 1.5e4 c = {ratio:.4}"),
    )
}

fn criterion_3() -> Outcome {
    let ceiling = localization_ceiling(10.6e3, 90e-12).unwrap() / C;
    outcome(
        (3.0e5..=4.2e5).contains(&ceiling),
        format!("ceiling {ceiling:.6e} c"),
    )
}

fn criterion_4() -> Outcome {
    let rec = loaded().record;
    let (theta0, phi0) = (rec.theta0(), rec.phi0());
    outcome(
        (theta0 - 1.24).abs() <= 0.02 && (phi0 - 2.247).abs() <= 0.01,
        format!("theta0 = {theta0:.6} rad, phi0 = {phi0:.6} rad"),
    )
}

fn criterion_5() -> Outcome {
    // component goldens from tests/oracle/geneva_oracle.py
    const GOLDEN: [f64; 3] = [-388_519.058_818_173_5, 84_977.945_617_154_31, -50_389.778_850_557_74];
    let rec = loaded().record;
    let v = rec.lab_velocity_at(0.0).unwrap();
    let components_ok = v
        .vector()
        .iter()
        .zip(GOLDEN)
        .all(|(got, want)| ((got - want) / want).abs() < 1e-9);
    let speed = v.magnitude() / 1e3;
    let speed_ok = (speed - 300.0).abs() <= 40.0;
    outcome(
        components_ok && speed_ok,
        format!(
            "|v| = {speed:.3} km/s (target 300 +/- 40), components {} oracle",
            if components_ok { "match" } else { "differ from" }
        ),
    )
}

fn random_record(rng: &mut impl Rng) -> ExperimentRecord {
    loop {
        let lat_a = rng.random_range(-1.2..1.2);
        let lon_a = rng.random_range(-3.1..3.1);
        let a = Station::new("A", lat_a, lon_a).unwrap();
        let b = Station::new(
            "B",
            (lat_a + rng.random_range(-0.05..0.05f64)).clamp(-1.3, 1.3),
            lon_a + rng.random_range(-0.05..0.05),
        )
        .unwrap();
        let d_ab = rng.random_range(1e3..5e4);
        let start = Utc.with_ymd_and_hms(1995, 1, 1, 0, 0, 0).unwrap()
            + ChronoDuration::seconds(rng.random_range(0..30 * 365 * 86_400));
        let duration = rng.random_range(4 * 3600..30 * 3600);
        let speed = rng.random_range(0.0..2e6);
        let direction = EquatorialDirection::new(
            rng.random_range(0.0..std::f64::consts::TAU),
            rng.random_range(-1.5..1.5),
        )
        .unwrap();
        let spec = RecordSpec {
            name: None,
            station_a: a,
            station_b: b,
            d_ab,
            start,
            end: start + ChronoDuration::seconds(duration),
            tau_start: rng.random_range(-0.5..0.5) * d_ab / C,
            tau_end: rng.random_range(-0.5..0.5) * d_ab / C,
            localization: rng.random_range(1e-12..1e-9),
            fringe_period: rng.random_range(600.0..7200.0),
            frame: FrameSpec::Moving {
                name: "random".into(),
                speed,
                direction,
            },
            constants: OrbitalConstants::default(),
            theta0: None,
            phi0: None,
        };
        if let Ok(rec) = ExperimentRecord::new(spec) {
            return rec;
        }
    }
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = 0u64;
    for _ in 0..1_000_000 {
        let r = rng.random_range(-1.0..1.0f64);
        let beta = rng.random_range(-1.0..1.0f64);
        if r.abs() >= 1.0 || beta.abs() >= 1.0 {
            continue;
        }
        match v_qi_min_boosted(r, beta) {
            Ok(QiSpeed::Unbounded) => {}
            Ok(QiSpeed::Finite(v)) if v.abs() > C => {}
            _ => failures += 1,
        }
    }

    let rec = loaded().record;
    let baseline = rec.baseline();
    let consts = rec.constants();
    let mut geometry_failures = 0;
    for _ in 0..10_000 {
        let t = rng.random_range(0.0..1e7);
        let e = baseline.unit_baseline(t, consts);
        let later = baseline.unit_baseline(t + consts.sidereal_day, consts);
        if (e.norm() - 1.0).abs() > 1e-12 || (e - later).norm() > 1e-9 {
            geometry_failures += 1;
        }
    }

    let mut ceiling_failures = 0;
    for _ in 0..100 {
        let rec = random_record(&mut rng);
        let series = evaluate_series(&rec, 60.0).unwrap();
        if !(series.bound <= series.ceiling) {
            ceiling_failures += 1;
        }
    }

    let series = evaluate_series(&rec, 10.0).unwrap();
    let bounds: Vec<f64> = [600.0, 1200.0, 1800.0, 3600.0, 5400.0, 7200.0, 14_400.0, 28_800.0]
        .iter()
        .map(|&fp| extract_bound(&series, fp).unwrap())
        .collect();
    let monotone = bounds.windows(2).all(|w| w[1] <= w[0]);

    outcome(
        failures == 0 && geometry_failures == 0 && ceiling_failures == 0 && monotone,
        format!(
            "subluminal {failures}/1e6, geometry {geometry_failures}/1e4, bound>ceiling {ceiling_failures}/100, monotone {monotone}"
        ),
    )
}

fn criterion_7() -> Outcome {
    let clock = Instant::now();
    let loaded = loaded();
    let rec = &loaded.record;
    let doc = Document::parse(FIXTURE).unwrap();
    let model = config::simulate_spec(&doc, rec).unwrap().model;
    let mut notes = Vec::new();
    let mut pass = true;
    for (k, multiple) in [1e3, 1e4].into_iter().enumerate() {
        let hyp = InfluenceHypothesis::new(InfluenceSpeed::Finite(multiple * C), rec.frame().clone()).unwrap();
        let injected = injected_intervals(&expected_counts(rec, &model, &hyp).unwrap(), model.bin_width);
        let bins = simulate(rec, &model, &hyp, 7_000 + k as u64).unwrap();
        let report = detect_collapse(&bins, &model).unwrap();
        let overlaps = report.collapse_interval.is_some_and(|(a, b)| {
            injected.iter().any(|&(lo, hi)| a < hi && lo < b)
        });
        pass &= overlaps;
        notes.push(format!("{multiple:e} c: injected {injected:?}, detected {:?}", report.collapse_interval));
    }
    let null = InfluenceHypothesis::new(InfluenceSpeed::Unbounded, rec.frame().clone()).unwrap();
    let false_positives = (0..100u64)
        .filter(|&seed| {
            let bins = simulate(rec, &model, &null, seed).unwrap();
            detect_collapse(&bins, &model).unwrap().collapsed
        })
        .count();
    let elapsed = clock.elapsed();
    pass &= false_positives == 0 && elapsed < Duration::from_secs(30);
    notes.push(format!("null false positives {false_positives}/100, runtime {:.2} s", elapsed.as_secs_f64()));
    outcome(pass, notes.join("; "))
}

fn criterion_8() -> Outcome {
    let loaded = loaded();
    let rec = &loaded.record;
    let report = runner::run_analyze(&loaded, 10.0, None).unwrap();
    let FrameSpec::Moving { speed, direction, .. } = FrameSpec::cmb() else {
        unreachable!()
    };
    let single = FrameGrid::new(vec![speed], vec![direction]).unwrap();
    let row = scan(rec, &single, 10.0).rows.remove(0);
    let cell = row.outcome.unwrap();
    let identical = cell.bound.to_bits() == report.bound.to_bits() && cell.n_crossings == report.crossings.len();

    let clock = Instant::now();
    let grid = FrameGrid::lattice(vec![speed], 12, 24).unwrap();
    let full = scan(rec, &grid, 10.0);
    let elapsed = clock.elapsed();
    let ok_cells = full.rows.iter().filter(|r| r.outcome.is_ok()).count();
    outcome(
        identical && full.rows.len() == 288 && elapsed < Duration::from_secs(60),
        format!(
            "dipole cell bit-identical {identical}; 12x24 grid {} cells ({ok_cells} ok) in {:.2} s",
            full.rows.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("Geneva reproduction", criterion_1),
        ("half-fringe bound", criterion_2),
        ("localization ceiling", criterion_3),
        ("epoch angles", criterion_4),
        ("frame speed", criterion_5),
        ("property suite", criterion_6),
        ("falsification closed loop", criterion_7),
        ("frame scan sanity", criterion_8),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let result = check();
        let status = if result.pass { "PASS" } else { "FAIL" };
        println!("criterion {}: {status} {name}: {}", n + 1, result.detail);
        failed += usize::from(!result.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
