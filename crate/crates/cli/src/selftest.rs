//! Desk-scale invariant checks across all modules.

use std::collections::HashMap;
use std::io::Write;

use mme_core::arith::{ExtRing, Ring, Zn64};
use mme_core::interp::{crt_combine, hermite_interpolate, CrtInstance, HermiteBlock};
use mme_core::kakeya::{build_kakeya, curve_coeffs};
use mme_core::mme_a::{evaluate_theorem1, mme_a_ext};
use mme_core::mme_b::{mme_b, mme_b_ext};
use mme_core::mpoly::{enumerate_exps, UniPoly};
use mme_core::primes::{ap_candidate_cap, ap_prime_search, is_prime_u64, small_primes_exceeding};
use mme_core::prodeval::taylor_correction;
use mme_core::{checks, MultiPoly, Natural};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bench::{read_csv, write_csv, BenchReport, BenchRow};
use crate::format::{emit, load, Loaded};
use crate::gen::{generate, GenSpec};

type Check = fn(&mut ChaCha8Rng) -> Result<(), String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn random_poly(ring: &Zn64, m: usize, d: usize, rng: &mut ChaCha8Rng) -> MultiPoly<Zn64> {
    let n = ring.n();
    MultiPoly::from_fn(ring.clone(), m, d, |_| rng.gen_range(0..n))
}

fn random_points(n: u64, m: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<u64>> {
    (0..count).map(|_| (0..m).map(|_| rng.gen_range(0..n)).collect()).collect()
}

fn agree(f: &MultiPoly<Zn64>, pts: &[Vec<u64>], got: &[u64]) -> Result<(), String> {
    for (p, v) in pts.iter().zip(got) {
        let want = f.naive_eval(p).map_err(err)?;
        ensure(*v == want, || format!("value at {p:?} is {v}, naive gives {want}"))?;
    }
    Ok(())
}

fn ring_laws(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for n in [97u64, 91, 1 << 40] {
        let ring = Zn64::with_power(n, 1).map_err(err)?;
        for _ in 0..200 {
            let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            let lhs = ring.mul(&a, &ring.add(&b, &c));
            let rhs = ring.add(&ring.mul(&a, &b), &ring.mul(&a, &c));
            ensure(lhs == rhs, || format!("distributivity fails mod {n}"))?;
        }
    }
    Ok(())
}

fn crt_round_trip(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let moduli: Vec<u64> = vec![7, 9, 11, 16, 25];
    let product: u64 = moduli.iter().product();
    for _ in 0..200 {
        let v = rng.gen_range(0..product);
        let inst = CrtInstance {
            moduli: moduli.iter().map(|&n| Natural::from(n)).collect(),
            residues: moduli.iter().map(|&n| Natural::from(v % n)).collect(),
        };
        let got = crt_combine(&inst).map_err(err)?;
        ensure(got == Natural::from(v), || format!("recovered {got} instead of {v}"))?;
    }
    Ok(())
}

fn hermite_round_trip(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let ring = Zn64::with_power(5, 3).map_err(err)?;
    for _ in 0..50 {
        let nodes = [0u64, 1, 2, 3];
        let mults: Vec<usize> = (0..4).map(|_| rng.gen_range(1..4)).collect();
        let len: usize = mults.iter().sum();
        let f = UniPoly::new(ring.clone(), (0..len).map(|_| rng.gen_range(0..125)).collect());
        let blocks: Vec<_> = nodes.iter().zip(&mults).map(|(a, &e)| HermiteBlock::of(&f, a, e)).collect();
        let g = hermite_interpolate(&ring, &blocks).map_err(err)?;
        ensure(g == f.clone().trimmed(), || "interpolant differs from the source polynomial".into())?;
    }
    Ok(())
}

fn taylor_identity(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let ring = Zn64::with_power(3, 2).map_err(err)?;
    for _ in 0..50 {
        let f = random_poly(&ring, 2, 4, rng);
        let b: Vec<u64> = (0..2).map(|_| rng.gen_range(0..9)).collect();
        let a: Vec<u64> = b.iter().map(|x| (x + 3 * rng.gen_range(0..3)) % 9).collect();
        let derivs: HashMap<_, _> = enumerate_exps(2, 1)
            .into_iter()
            .map(|e| {
                let v = f.hasse_derivative(&e).naive_eval(&b).unwrap();
                (e, v)
            })
            .collect();
        let got = taylor_correction(&ring, &derivs, &a, &b).map_err(err)?;
        agree(&f, &[a], &[got])?;
    }
    Ok(())
}

fn kakeya_containment(_: &mut ChaCha8Rng) -> Result<(), String> {
    let k = build_kakeya(7, 2, 2).map_err(err)?;
    for x in 0..49 {
        let a = [x % 7, x / 7];
        let curve = curve_coeffs(&a, &k);
        for tau in 0..7 {
            ensure(k.contains(tau, &curve.eval(&k, tau)), || format!("curve of {a:?} leaves S_{tau}"))?;
        }
    }
    ensure(build_kakeya(5, 2, 2).is_err(), || "u + 1 = 3 must not divide q - 1 = 4".into())
}

fn prime_machinery(_: &mut ChaCha8Rng) -> Result<(), String> {
    let m = Natural::from(1u64 << 32);
    let res = ap_prime_search(20, &m).map_err(err)?;
    ensure(res.d_tilde >= 16 && res.d_tilde <= 20, || format!("d_tilde {} out of range", res.d_tilde))?;
    ensure(res.primes.iter().all(|&p| p % res.d_tilde == 1 && is_prime_u64(p)), || "bad progression".into())?;
    ensure(res.product > m, || "product too small".into())?;
    ensure(res.primes.iter().all(|&p| p <= ap_candidate_cap(20, &m)), || "prime above the cap".into())?;
    let small = small_primes_exceeding(&Natural::from(1_000_000u32)).map_err(err)?;
    ensure(small.iter().map(|&p| Natural::from(p)).product::<Natural>() > Natural::from(1_000_000u32), || {
        "small primes do not exceed the bound".into()
    })
}

fn algorithm_a(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let ring = Zn64::with_power(13, 1).map_err(err)?;
    let f = random_poly(&ring, 2, 4, rng);
    let pts = random_points(13, 2, 10, rng);
    agree(&f, &pts, &evaluate_theorem1(&f, &pts).map_err(err)?)?;
    let f4 = ExtRing::new(Zn64::with_power(2, 1).map_err(err)?, vec![1, 1, 1]).map_err(err)?;
    let mut g = MultiPoly::zero(f4.clone(), 2, 2);
    g.set_coeff(&mme_core::ExpVec(vec![1, 1]), f4.one()).map_err(err)?;
    let got = mme_a_ext(&g, &[vec![f4.generator(), f4.one()]]).map_err(err)?;
    ensure(got == vec![vec![0, 1]], || format!("x1 x2 at (z, 1) gave {got:?}"))
}

fn algorithm_b(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let ring = Zn64::with_power(6, 2).map_err(err)?;
    let f = random_poly(&ring, 2, 3, rng);
    let pts = random_points(36, 2, 10, rng);
    for t in 0..=2 {
        agree(&f, &pts, &mme_b(&f, &pts, t).map_err(err)?)?;
    }
    let f8 = ExtRing::new(Zn64::with_power(2, 1).map_err(err)?, vec![1, 1, 0, 1]).map_err(err)?;
    let g = MultiPoly::from_fn(f8.clone(), 2, 3, |_| (0..3).map(|_| rng.gen_range(0..2)).collect());
    let pts: Vec<Vec<Vec<u64>>> = (0..5)
        .map(|_| (0..2).map(|_| (0..3).map(|_| rng.gen_range(0..2)).collect()).collect())
        .collect();
    let got = mme_b_ext(&g, &pts, 1).map_err(err)?;
    for (p, v) in pts.iter().zip(&got) {
        ensure(*v == g.naive_eval(p).map_err(err)?, || format!("extension value at {p:?} differs"))?;
    }
    Ok(())
}

fn file_round_trip(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let mut spec = GenSpec::new(rng.gen(), 97, 2, 3, 5);
    for ext in [None, Some(vec![1u32.into(), 1u32.into(), 1u32.into()])] {
        spec.ext = ext.clone();
        spec.r = if ext.is_some() { 2u32.into() } else { 97u32.into() };
        let (inst, pts) = generate(&spec).map_err(err)?;
        let loaded = load(&inst, &pts).map_err(err)?;
        let spec_ext = inst.ext.clone();
        let (inst2, pts2) = match &loaded {
            Loaded::Word(p) => emit(p, &spec.r, spec.s, spec_ext),
            Loaded::WordExt(p) => emit(p, &spec.r, spec.s, spec_ext),
            _ => return Err("small instance loaded with big integers".into()),
        };
        ensure(inst == inst2 && pts == pts2, || "emit(load(x)) differs from x".into())?;
    }
    Ok(())
}

fn csv_round_trip(_: &mut ChaCha8Rng) -> Result<(), String> {
    let row = BenchRow {
        algo: "mme-b".into(),
        r: "65536".into(),
        s: 1,
        e: 1,
        m: 3,
        d: 4,
        n: 1000,
        wall_time_ns: 123_456,
        per_point_ns: 123,
        checked: true,
    };
    let report = BenchReport { rows: vec![row.clone()], crossovers: vec!["crossover algo=mme-b N=none".into()] };
    let mut buf = Vec::new();
    write_csv(&report, &mut buf).map_err(err)?;
    let rows = read_csv(std::str::from_utf8(&buf).map_err(err)?).map_err(err)?;
    ensure(rows == vec![row], || "CSV rows changed on the round trip".into())
}

fn no_failed_checks(_: &mut ChaCha8Rng) -> Result<(), String> {
    let s = checks::stats();
    ensure(s.failed == 0, || format!("{} of {} runtime checks failed", s.failed, s.performed))
}

pub const CHECKS: &[(&str, Check)] = &[
    ("ring laws", ring_laws),
    ("crt round trip", crt_round_trip),
    ("hermite round trip", hermite_round_trip),
    ("taylor correction", taylor_identity),
    ("kakeya containment", kakeya_containment),
    ("prime machinery", prime_machinery),
    ("algorithm a", algorithm_a),
    ("algorithm b", algorithm_b),
    ("file round trip", file_round_trip),
    ("bench csv round trip", csv_round_trip),
    ("runtime checks", no_failed_checks),
];

/// Runs every check, printing one line each; returns the names of failures.
pub fn run(out: &mut impl Write) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e1f);
    let mut failed = Vec::new();
    for (name, check) in CHECKS {
        let res = check(&mut rng);
        let _ = match &res {
            Ok(()) => writeln!(out, "{name:<24} PASS"),
            Err(e) => writeln!(out, "{name:<24} FAIL  {e}"),
        };
        if res.is_err() {
            failed.push(name.to_string());
        }
    }
    failed
}
