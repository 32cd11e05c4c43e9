//! Acceptance suite: one PASS/FAIL line per criterion, with the pinned
//! tolerance and the runtime ceiling. Runs without the libtest harness so the
//! lines always reach stdout.
//!
//! Two criteria are known not to be attainable as stated (see the README).
//! Their lines print FAIL, and the suite instead asserts the documented
//! outcome, so a change in either direction is caught.

use std::process::ExitCode;
use std::time::Instant;

use ordinal_ramsey::front::{make_degenerate, make_uniform, restrict};
use ordinal_ramsey::lower::{verify_homogeneous, verify_m};
use ordinal_ramsey::ordinal::mul_nat;
use ordinal_ramsey::parse::ord;
use ordinal_ramsey::pigeon::{find_bad_extension, verify_arrow_witness, verify_bad_coloring};
use ordinal_ramsey::sample::{subsets_of, FuzzConfig, Sampler};
use ordinal_ramsey::upper::UpperError;
use ordinal_ramsey::verify::bachmann_remark;
use ordinal_ramsey::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 3;

/// What the suite expects a criterion to report.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Expect {
    Pass,
    /// Not attainable as stated; the line prints FAIL and `documented` must
    /// hold.
    DocumentedFail,
}

struct Outcome {
    pass: bool,
    /// For [`Expect::DocumentedFail`]: whether the recorded facts reproduced.
    documented: bool,
    detail: String,
}

impl Outcome {
    fn pass_if(pass: bool, detail: String) -> Self {
        Outcome { pass, documented: true, detail }
    }
}

struct Criterion {
    id: u32,
    title: &'static str,
    tolerance: &'static str,
    ceiling_secs: f64,
    expect: Expect,
    run: fn(&SeqCtx) -> Outcome,
}

fn unif(n: u64) -> Front {
    make_uniform(n, BaseStream::AllFrom(0))
}

fn campaign(kind: CampaignKind, samples: u64, ctx: &SeqCtx) -> Report {
    let cfg = FuzzConfig { seed: SEED, samples, ..Default::default() };
    fuzz_campaign(kind, &cfg, &CampaignOptions::default(), ctx)
}

fn counter(r: &Report, key: &str) -> u64 {
    r.counters.get(key).copied().unwrap_or(0)
}

fn summary(r: &Report) -> String {
    let parts: Vec<String> = r.counters.iter().map(|(k, v)| format!("{k}={v}")).collect();
    parts.join(" ")
}

fn fs_golden(ctx: &SeqCtx) -> Outcome {
    let table = [
        ("1", 5, "0"),
        ("w", 2, "2"),
        ("w^(w)", 2, "w^(2)*2"),
        ("eps(0)", 2, "w^(w)"),
        ("eps(1)", 1, "w^(w^(eps(0)+1))"),
        ("G(0)", 1, "eps(0)"),
        ("eps(0)+w", 3, "eps(0)+3"),
    ];
    let mut bad = Vec::new();
    for (alpha, n, want) in table {
        let got = fs_step(&ord(alpha), n, ctx);
        if got != ord(want) {
            bad.push(format!("{alpha}[{n}] = {got}, want {want}"));
        }
    }
    Outcome::pass_if(bad.is_empty(), if bad.is_empty() { format!("{} entries exact", table.len()) } else { bad.join("; ") })
}

fn bachmann(ctx: &SeqCtx) -> Outcome {
    let r = bachmann_remark(ctx);
    let w = &r.witnesses[0];
    let pass = r.verdict == ordinal_ramsey::Outcome::Pass && w["gamma[1]"] == "phi(1,0)" && w["beta[1]"] == "w^(w^(phi(1,0)+1))";
    Outcome::pass_if(pass, format!("beta[1] = {}, gamma[1] = {}", w["beta[1]"], w["gamma[1]"]))
}

fn nested(ctx: &SeqCtx) -> Outcome {
    let r = campaign(CampaignKind::Nested, 100_000, ctx);
    let pass = r.verdict == ordinal_ramsey::Outcome::Pass
        && counter(&r, "nested-a.holds") == 100_000
        && counter(&r, "remark.not-flagged") == 1;
    Outcome::pass_if(pass, summary(&r))
}

fn regular_subset(ctx: &SeqCtx) -> Outcome {
    let reg = campaign(CampaignKind::Regular, 10_000, ctx);
    let sub = campaign(CampaignKind::Subset, 10_000, ctx);
    let pass = reg.verdict == ordinal_ramsey::Outcome::Pass
        && sub.verdict == ordinal_ramsey::Outcome::Pass
        && counter(&reg, "regular.holds") == 10_000;
    Outcome::pass_if(pass, format!("{} | {}", summary(&reg), summary(&sub)))
}

fn goodness(ctx: &SeqCtx) -> Outcome {
    let r = campaign(CampaignKind::Goodness, 10_000, ctx);
    let pass = r.verdict == ordinal_ramsey::Outcome::Pass && counter(&r, "goodness.holds") == 10_000;
    Outcome::pass_if(pass, format!("fuel {} steps; {}", ctx.fuel.max_descent_steps, summary(&r)))
}

fn front_laws(ctx: &SeqCtx) -> Outcome {
    let r = campaign(CampaignKind::FrontLaws, 20_000, ctx);
    let pass = r.verdict == ordinal_ramsey::Outcome::Pass
        && counter(&r, "front-height.holds") == 20_000
        && counter(&r, "front-tail.holds") == 20_000
        && counter(&r, "front-smooth.holds") == 4;
    Outcome::pass_if(pass, summary(&r))
}

fn pigeon_small(ctx: &SeqCtx) -> Outcome {
    let _ = ctx;
    let mut notes = Vec::new();
    let mut pass = true;
    let ground: Vec<u64> = (0..8).collect();
    for (fronts, size, height) in [(vec![unif(2), unif(2)], 4usize, 4u64), (vec![unif(1); 3], 3, 3)] {
        let p = pigeon_front(&fronts).expect("pigeon front");
        let mut checked = 0;
        for s in subsets_of(&ground, size + 2) {
            let want = match s.len().cmp(&size) {
                std::cmp::Ordering::Less => Class::Small,
                std::cmp::Ordering::Equal => Class::Size,
                std::cmp::Ordering::Greater => Class::Large,
            };
            checked += 1;
            if p.classify(&s).expect("classify") != want {
                pass = false;
                notes.push(format!("{s:?} misclassified"));
            }
        }
        let h = p.height().expect("height");
        pass &= h == Some(Ordinal::nat(height));
        notes.push(format!("{size}-sets over {checked} subsets, height {}", h.map(|h| h.to_string()).unwrap_or_default()));
    }
    let a = [unif(2), unif(2)];
    let ds = [
        unif(3),
        oplus(&unif(1), &unif(2)).unwrap(),
        oplus(&unif(2), &unif(1)).unwrap(),
        oplus(&unif(1), &oplus(&unif(1), &unif(1)).unwrap()).unwrap(),
        restrict(&unif(3), BaseStream::AllFrom(2)).unwrap(),
        make_alpha_size(&Ordinal::nat(3), BaseStream::AllFrom(2), &SeqCtx::default()).unwrap(),
    ];
    let mut found = 0;
    for d in &ds {
        pass &= d.height().ok().flatten() == Some(Ordinal::nat(3));
        match find_bad_extension(d, &a, 10) {
            Ok(w) => {
                let mut pts = w.s.as_slice().to_vec();
                let s_is_size = d.classify(&pts).ok() == Some(Class::Size);
                pts.push(w.n);
                let ok = s_is_size && verify_bad_coloring(&pts, &w.coloring, &a).unwrap_or(false);
                pass &= ok;
                found += ok as usize;
            }
            Err(e) => {
                pass = false;
                notes.push(format!("{}: {e}", d.describe()));
            }
        }
    }
    notes.push(format!("bad extensions re-verified for {found}/{} height-3 fronts", ds.len()));
    Outcome::pass_if(pass, notes.join("; "))
}

fn arrow(ctx: &SeqCtx) -> Outcome {
    let _ = ctx;
    let a = [unif(2), unif(2)];
    let c = unif(1);
    let six: Vec<u64> = (0..6).collect();
    let five: Vec<u64> = (0..5).collect();
    let four: Vec<u64> = (0..4).collect();
    let r6 = arrow_check(&six, &a, &c, 1 << 24).unwrap();
    let r5 = arrow_check(&five, &a, &c, 1 << 24).unwrap();
    let r4 = arrow_check(&four, &a, &c, 1 << 24).unwrap();
    let w4 = r4.witness.as_ref().map(|w| verify_arrow_witness(&four, w, &a, &c).unwrap()).unwrap_or(false);
    let golden = ram_pigeon(&[ord("2"), ord("2")]) == ord("4") && ram_pigeon(&[ord("w"), ord("w")]) == ord("w*2");
    let pass = r6.verdict == ArrowVerdict::Holds && r5.verdict == ArrowVerdict::Holds && r4.verdict == ArrowVerdict::Fails && w4 && golden;
    Outcome::pass_if(
        pass,
        format!(
            "6 points: {:?}; 5 points: {:?} (criterion text says fails, see README); 4 points: {:?} with verified witness {w4}; ram_pigeon golden {golden}",
            r6.verdict, r5.verdict, r4.verdict
        ),
    )
}

fn peeling(ctx: &SeqCtx) -> Outcome {
    let p = campaign(CampaignKind::Peeling, 10_000, ctx);
    let z = campaign(CampaignKind::Zeta, 10_000, ctx);
    let pass = p.verdict == ordinal_ramsey::Outcome::Pass
        && z.verdict == ordinal_ramsey::Outcome::Pass
        && counter(&p, "peel-suffix.holds") == 10_000
        && counter(&p, "peel-shortcut.holds") == 1_000
        && counter(&p, "peel-power-bound.holds") == 10_000
        && counter(&p, "peel-log-bound.holds") == 10_000
        && counter(&z, "zeta-linear.holds") == 10_000;
    Outcome::pass_if(pass, format!("{} | {}", summary(&p), summary(&z)))
}

fn lower_instance(ctx: &SeqCtx) -> Outcome {
    let p = LowerParams { alpha: ord("w"), gamma: ord("1"), k: 1, mu: ord("w*3") };
    let m = build_m(&p, 8, ctx).unwrap();
    let certified = m.elements.len() == 8 && verify_m(&m, &p, ctx).unwrap();
    let s = &m.elements[..6];
    let mut lc = LowerColoring::new(s, &p, ctx).unwrap();
    let col = lc.table().unwrap();
    let pairs = subsets_of(s, 2).into_iter().filter(|u| u.len() == 2).count();
    let total = col.entries.len() == pairs && col.k == 4 && col.colors_in_range();
    let peel_inv = lc.prefix_peel_invariance().unwrap();
    let color_inv = lc.prefix_invariance().unwrap();
    let search = homog_absence_check(s, &col, &p.gamma, &p.alpha, ctx, 1_000_000).unwrap();
    let none = match &search {
        HomogSearch::NoneFound { .. } => true,
        HomogSearch::Found { witness, .. } => !verify_homogeneous(witness.as_slice(), &col, &p.gamma, &p.alpha, ctx),
    };
    let pass = certified && total && color_inv.is_none() && none;
    let documented = certified
        && total
        && none
        && peel_inv.is_none()
        && color_inv == Some(FiniteSet::from_sorted(vec![14, 39, 89]));
    let detail = format!(
        "M = {:?} certified {certified}; {} sets, {} colors, total {total}; color prefix-invariance counterexample {}; peel prefix-invariance {}; homogeneous search {}",
        m.elements,
        col.entries.len(),
        col.k,
        color_inv.map(|u| u.to_string()).unwrap_or_else(|| "none".into()),
        if peel_inv.is_none() { "holds" } else { "fails" },
        serde_json::to_string(&search).unwrap(),
    );
    Outcome { pass, documented, detail }
}

fn pair_coloring(points: u64, bits: u64) -> Coloring {
    let mut pairs = Vec::new();
    let mut i = 0;
    for a in 0..points {
        for b in a + 1..points {
            pairs.push((FiniteSet::from_sorted(vec![a, b]), (bits >> i & 1) as usize));
            i += 1;
        }
    }
    Coloring::new(2, pairs)
}

/// Whether some `a < b < c < d` has `ab = ac = ad` and `bc = bd`.
fn has_prehomogeneous_quadruple(points: u64, color: impl Fn(u64, u64) -> bool) -> bool {
    for a in 0..points {
        for b in a + 1..points {
            for c in b + 1..points {
                for d in c + 1..points {
                    let x = color(a, b);
                    if color(a, c) == x && color(a, d) == x && color(b, c) == color(b, d) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

fn pair_index(points: u64, a: u64, b: u64) -> u64 {
    (0..a).map(|x| points - 1 - x).sum::<u64>() + (b - a - 1)
}

/// Runs the closure, prehomogeneous and homogeneous stages for one pair
/// coloring; `Ok(false)` when no prehomogeneous set exists.
fn pipeline(s: &[u64], col: &Coloring, pa: &Front, u1: &Front, deg: &Front) -> Result<bool, String> {
    match prehomog_extract(s, col, pa, u1, deg, 1 << 20) {
        Ok(r) => {
            let h = homog_from_prehomog(r.t.as_slice(), col, u1, u1, 2).map_err(|e| e.to_string())?;
            Ok(h.set.len() == 3)
        }
        Err(UpperError::Contract(_)) => Ok(false),
        Err(e) => Err(e.to_string()),
    }
}

fn upper_instance(ctx: &SeqCtx) -> Outcome {
    let _ = ctx;
    let u1 = unif(1);
    let deg = make_degenerate();
    let pa = pigeon_front(&[u1.clone(), u1.clone()]).unwrap();
    let pairs_front = oplus(&u1, &u1).unwrap();
    let closure = ramsey_closure(std::slice::from_ref(&u1), &pairs_front, 2, 1 << 24).unwrap();
    let r33 = closure.classify(&[0, 1, 2, 3, 4, 5]).unwrap() == Class::Size;
    let s: Vec<u64> = (0..7).collect();
    let (mut ok, mut fail, mut oracle_fail, mut errors) = (0u64, 0u64, 0u64, 0u64);
    for bits in 0u64..(1 << 21) {
        let col = pair_coloring(7, bits);
        match pipeline(&s, &col, &pa, &u1, &deg) {
            Ok(true) => ok += 1,
            Ok(false) => fail += 1,
            Err(_) => errors += 1,
        }
        if !has_prehomogeneous_quadruple(7, |a, b| bits >> pair_index(7, a, b) & 1 == 1) {
            oracle_fail += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let s8: Vec<u64> = (0..8).collect();
    let samples8 = 500;
    let mut ok8 = 0;
    for _ in 0..samples8 {
        let col = pair_coloring(8, rng.gen_range(0..1u64 << 28));
        ok8 += matches!(pipeline(&s8, &col, &pa, &u1, &deg), Ok(true)) as u64;
    }
    let pass = fail == 0 && errors == 0;
    let documented = r33 && ok == 2_052_992 && fail == 44_160 && oracle_fail == fail && errors == 0 && ok8 == samples8;
    let detail = format!(
        "closure Size set of 6 points {r33}; 7 points: {ok} of 2^21 colorings verified, {fail} have no prehomogeneous 4-set (independent count {oracle_fail}); 8 points: {ok8}/{samples8} sampled colorings verified"
    );
    Outcome { pass, documented, detail }
}

fn bounds(ctx: &SeqCtx) -> Outcome {
    let _ = ctx;
    let golden = ram_limit(&ord("w^(2)"), &ord("1")) == ord("w^(w^(3))") && ram_limit(&ord("w"), &ord("w")) == ord("phi(1,w^(2))");
    let mut smp = Sampler::new(FuzzConfig { seed: SEED, max_gamma_index: 2, ..Default::default() });
    let mut agree = 0;
    for i in 0..100u64 {
        let alpha = smp.ordinal();
        let k = 1 + i % 4;
        let mut oracle = Ordinal::zero();
        for _ in 0..k {
            oracle = nat_sum(&oracle, &alpha);
        }
        agree += (ram_upper(&alpha, &Ordinal::zero(), k) == oracle) as u32;
    }
    let mono = compare(&ram_upper(&ord("w^(2)"), &ord("w"), 2), &ram_upper(&ord("w^(2)"), &ord("w"), 3)).is_lt()
        && compare(&ram_upper(&ord("w^(2)"), &ord("w"), 3), &ram_limit(&ord("w^(2)"), &ord("w"))).is_lt()
        && ram_upper(&ord("w"), &Ordinal::zero(), 2) == mul_nat(&ord("w"), 2);
    Outcome::pass_if(golden && agree == 100 && mono, format!("golden limits {golden}; alpha (x) k agrees with repeated natural sums on {agree}/100; monotone {mono}"))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, title: "fundamental-sequence golden table", tolerance: "exact", ceiling_secs: 1.0, expect: Expect::Pass, run: fs_golden },
        Criterion { id: 2, title: "Bachmann-failure chain", tolerance: "exact", ceiling_secs: 1.0, expect: Expect::Pass, run: bachmann },
        Criterion { id: 3, title: "nestedness fuzz, 1e5 pairs", tolerance: "0 violations", ceiling_secs: 300.0, expect: Expect::Pass, run: nested },
        Criterion { id: 4, title: "regularity and subset monotonicity, 1e4 each", tolerance: "0 violations", ceiling_secs: 120.0, expect: Expect::Pass, run: regular_subset },
        Criterion { id: 5, title: "goodness, 1e4 pairs", tolerance: "0 violations", ceiling_secs: 300.0, expect: Expect::Pass, run: goodness },
        Criterion { id: 6, title: "B^alpha front laws, 5e3 nodes per alpha", tolerance: "0 violations", ceiling_secs: 180.0, expect: Expect::Pass, run: front_laws },
        Criterion { id: 7, title: "pigeonhole small cases", tolerance: "exact", ceiling_secs: 60.0, expect: Expect::Pass, run: pigeon_small },
        Criterion { id: 8, title: "arrow brute force and ram_pigeon", tolerance: "exact", ceiling_secs: 60.0, expect: Expect::Pass, run: arrow },
        Criterion { id: 9, title: "peeling suite, 1e4 tuples", tolerance: "0 violations", ceiling_secs: 300.0, expect: Expect::Pass, run: peeling },
        Criterion { id: 10, title: "lower-bound pinned instance", tolerance: "exact", ceiling_secs: 600.0, expect: Expect::DocumentedFail, run: lower_instance },
        Criterion { id: 11, title: "upper-bound end to end, 7 points", tolerance: "every coloring", ceiling_secs: 600.0, expect: Expect::DocumentedFail, run: upper_instance },
        Criterion { id: 12, title: "bound evaluators", tolerance: "exact", ceiling_secs: 1.0, expect: Expect::Pass, run: bounds },
    ];
    let ctx = SeqCtx::default();
    let mut mismatches = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let out = (c.run)(&ctx);
        let secs = start.elapsed().as_secs_f64();
        let in_time = secs <= c.ceiling_secs;
        let pass = out.pass && in_time;
        println!(
            "{} criterion {:>2}: {} [tolerance: {}; {:.2} s of {:.0} s] {}",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            c.tolerance,
            secs,
            c.ceiling_secs,
            out.detail
        );
        let as_expected = match c.expect {
            Expect::Pass => pass,
            Expect::DocumentedFail => !out.pass && out.documented && in_time,
        };
        if !as_expected {
            mismatches.push(c.id);
        }
    }
    if mismatches.is_empty() {
        println!("acceptance: all criteria report their expected outcome");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected outcome for criteria {mismatches:?}");
        ExitCode::FAILURE
    }
}
