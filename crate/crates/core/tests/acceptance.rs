//! Acceptance suite. Runs as a plain binary so the PASS/FAIL lines always
//! reach the terminal; exits nonzero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toricstab::filtrations::{dh_measure, filtration_curve};
use toricstab::geometry::{mixed_volume, LatticeVector, Polytope};
use toricstab::poly::Polynomial;
use toricstab::rational::{int, ratio, Rational};
use toricstab::test_curves::{extended_curve, g_divisor, g_polynomial, g_polynomial_closed};
use toricstab::thresholds::{
    delta_pp_quotient, delta_prime_quotient, delta_quotient, delta_search,
};
use toricstab::toric::{intersection_number, zariski_decompose, Fan, Model, ToricDivisor};
use toricstab::volume_fn::{big_volume, pseudo_effective_threshold, volume_curve};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn lv(c: &[i64]) -> LatticeVector {
    LatticeVector(c.to_vec())
}

fn div(c: &[i64]) -> ToricDivisor {
    ToricDivisor::from_ints(c)
}

fn p2() -> Fan {
    Fan::projective_space(2)
}

/// Blow-up of P^2 at a torus-fixed point; rays (1,0), (0,1), (-1,-1), (1,1).
fn f1() -> Fan {
    Model::new(p2(), &[lv(&[1, 1])]).unwrap().fan().clone()
}

fn p1xp1() -> Fan {
    Fan::product_of_lines(2)
}

fn varieties() -> Vec<(&'static str, Fan)> {
    vec![("P2", p2()), ("F1", f1()), ("P1xP1", p1xp1())]
}

fn minus_k(fan: &Fan) -> ToricDivisor {
    ToricDivisor::anticanonical(fan.ray_count())
}

fn within(limit: Duration, start: Instant) -> Check {
    let took = start.elapsed();
    ensure!(took < limit, "took {took:?}, limit {limit:?}");
    Ok(())
}

/// `delta(P^2, -K) = 1`, with `S = (1/9) int_0^3 (3 - t)^2 dt` along rays.
fn criterion_1() -> Check {
    let start = Instant::now();
    let fan = p2();
    let r = delta_search(&fan, &minus_k(&fan), 2).map_err(|e| e.to_string())?;
    within(Duration::from_secs(1), start)?;
    ensure!(r.delta == int(1), "delta = {}", r.delta);
    ensure!(
        r.headline() == "delta = 1 (exact) at u=(1,0)",
        "headline {:?}",
        r.headline()
    );
    let three_minus_t = Polynomial::affine(int(3), int(-1));
    let s_hand = three_minus_t.pow(2).integrate(&int(0), &int(3)) / int(9);
    for u in fan.rays() {
        let row = r
            .candidates
            .iter()
            .find(|c| &c.u == u)
            .ok_or("ray missing from candidates")?;
        ensure!(
            row.a == int(1) && row.s == s_hand,
            "ray {u}: A = {}, S = {}",
            row.a,
            row.s
        );
    }
    Ok(())
}

/// `delta(Bl_p P^2, -K) = 6/7` at `u = (1,1)`, with `S = (1/8) int_0^2 (8 - 2t - t^2) dt`.
fn criterion_2() -> Check {
    let start = Instant::now();
    let fan = f1();
    let r = delta_search(&fan, &minus_k(&fan), 2).map_err(|e| e.to_string())?;
    within(Duration::from_secs(5), start)?;
    ensure!(r.delta == ratio(6, 7), "delta = {}", r.delta);
    ensure!(r.minimizer == lv(&[1, 1]), "minimizer {}", r.minimizer);
    let vol_hand = Polynomial::new(vec![int(8), int(-2), int(-1)]);
    let e = ToricDivisor::prime(4, 3);
    let vc = volume_curve(&fan, &minus_k(&fan), &e).map_err(|e| e.to_string())?;
    ensure!(vc.tau_plus == int(2), "tau+ = {}", vc.tau_plus);
    for k in 0..=8 {
        let t = ratio(k, 4);
        ensure!(vc.eval(&t) == vol_hand.eval(&t), "vol(-K - {t} E)");
    }
    let s_hand = vol_hand.integrate(&int(0), &int(2)) / int(8);
    ensure!(s_hand == ratio(7, 6), "hand S = {s_hand}");
    let row = r
        .candidates
        .iter()
        .find(|c| c.u == lv(&[1, 1]))
        .ok_or("(1,1) missing")?;
    ensure!(
        row.s == s_hand && row.a == int(1),
        "S = {}, A = {}",
        row.s,
        row.a
    );
    Ok(())
}

/// The H-family on P^2 with `L = 3H`: every functional against a hand
/// integration of `P_tau = (3 - tau) H`.
fn criterion_3() -> Check {
    let fan = p2();
    let l = div(&[0, 0, 3]);
    let c = extended_curve(&Model::trivial(fan.clone()), &l, &div(&[0, 0, 1]))
        .map_err(|e| e.to_string())?;
    let (zero, three, v) = (int(0), int(3), int(9));
    let p = Polynomial::affine(int(3), int(-1));
    // (P^2) = (3 - tau)^2, (L . P) = 3 (3 - tau), (K_Y . P) = -3 (3 - tau).
    let energy = p.pow(2).integrate(&zero, &three) / &v;
    let e_omega = p.scale(&int(3)).integrate(&zero, &three) / &v;
    let jtilde = (p.scale(&int(3)).sub(&p.pow(2))).integrate(&zero, &three) * int(2) / &v;
    let ricci = -int(2) * p.scale(&int(3)).integrate(&zero, &three) / &v;
    // Red D = H, so Ent = (2/9) int (P . H).
    let entropy = p.integrate(&zero, &three) * int(2) / &v;
    let want = [
        ("energy", c.energy(), energy, int(1)),
        (
            "E^omega",
            c.alpha_energy(&l).map_err(|e| e.to_string())?,
            e_omega,
            ratio(3, 2),
        ),
        (
            "jtilde",
            c.jtilde().map_err(|e| e.to_string())?,
            jtilde,
            int(1),
        ),
        (
            "entropy",
            c.entropy().map_err(|e| e.to_string())?,
            entropy.clone(),
            int(1),
        ),
        (
            "ricci_energy",
            c.ricci_energy().map_err(|e| e.to_string())?,
            ricci.clone(),
            int(-3),
        ),
        (
            "twisted_mabuchi",
            c.twisted_mabuchi().map_err(|e| e.to_string())?,
            ricci + entropy,
            int(-2),
        ),
    ];
    for (name, got, hand, stated) in want {
        ensure!(
            got == hand && hand == stated,
            "{name}: got {got}, hand {hand}, stated {stated}"
        );
    }
    let curve = filtration_curve(&fan, &l, &lv(&[-1, -1])).map_err(|e| e.to_string())?;
    let nu = dh_measure(&curve, &v).map_err(|e| e.to_string())?;
    ensure!(
        nu.first_moment() == int(1),
        "DH first moment {}",
        nu.first_moment()
    );
    Ok(())
}

/// `delta'(P^2, 3H, H) = 15/7`: numerator `5` by G_1 and by
/// `int_0^1 2 ((3 - tau) H . H) dtau`, denominator `7/3`.
fn criterion_4() -> Check {
    let fan = p2();
    let (l, h) = (div(&[0, 0, 3]), div(&[0, 0, 1]));
    let model = Model::trivial(fan.clone());
    let q = delta_prime_quotient(&model, &l, &h, &div(&[0, 0, 0])).map_err(|e| e.to_string())?;
    ensure!(q == ratio(15, 7), "delta' = {q}");
    let by_g = int(2) * g_divisor(&fan, &l, &h, &h).map_err(|e| e.to_string())?;
    let by_integral = Polynomial::affine(int(6), int(-2)).integrate(&int(0), &int(1));
    ensure!(
        by_g == by_integral && by_g == int(5),
        "numerator: G route {by_g}, integral route {by_integral}"
    );
    // 2 int_0^1 ((L . P) - P^2) with P = (3 - tau) H.
    let p = Polynomial::affine(int(3), int(-1));
    let denominator = int(2) * p.scale(&int(3)).sub(&p.pow(2)).integrate(&int(0), &int(1));
    ensure!(denominator == ratio(7, 3), "denominator {denominator}");
    ensure!(by_g / denominator == q, "hand quotient differs");
    Ok(())
}

/// Exact identities: energy = DH moment and `jtilde = n (E^omega - E)` on
/// every ray of the three surfaces, the two forms of `G_{n-1}` against a
/// direct integral, and `Ent / Jtilde = A / S` at coefficient 1.
fn criterion_5() -> Check {
    let mut rays_checked = 0;
    for (name, fan) in varieties() {
        let l = minus_k(&fan);
        let model = Model::trivial(fan.clone());
        let v = big_volume(&fan, &l).map_err(|e| e.to_string())?;
        for (i, u) in fan.rays().iter().enumerate() {
            let c = extended_curve(&model, &l, &ToricDivisor::prime(fan.ray_count(), i))
                .map_err(|e| e.to_string())?;
            let nu = dh_measure(
                &filtration_curve(&fan, &l, u).map_err(|e| e.to_string())?,
                &v,
            )
            .map_err(|e| e.to_string())?;
            ensure!(
                c.energy() == nu.first_moment(),
                "{name} ray {u}: E {} vs DH {}",
                c.energy(),
                nu.first_moment()
            );
            let n = int(fan.dim() as i64);
            let ew = c.alpha_energy(&l).map_err(|e| e.to_string())?;
            let jt = c.jtilde().map_err(|e| e.to_string())?;
            ensure!(jt == n * (ew - c.energy()), "{name} ray {u}: jtilde {jt}");
            rays_checked += 1;
        }
    }
    ensure!(rays_checked >= 10, "only {rays_checked} rays");

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let a = ratio(rng.gen_range(-30..=30), rng.gen_range(1..=7));
        let b = ratio(rng.gen_range(-30..=30), rng.gen_range(1..=7));
        let n = rng.gen_range(1..=5usize);
        let g = g_polynomial(&a, &b, n);
        // int_0^1 (A - sB)^{n-1} ds
        let direct = Polynomial::affine(a.clone(), -b.clone())
            .pow(n - 1)
            .integrate(&int(0), &int(1));
        ensure!(
            g == direct,
            "G_{}({a}, {b}) = {g}, integral {direct}",
            n - 1
        );
        if let Some(closed) = g_polynomial_closed(&a, &b, n) {
            ensure!(closed == g, "closed form {closed} vs {g}");
        }
    }

    let cases = [
        ("P2/H", p2(), 2usize, lv(&[-1, -1])),
        ("F1/E", f1(), 3, lv(&[1, 1])),
    ];
    for (name, fan, i, u) in cases {
        let l = minus_k(&fan);
        let model = Model::trivial(fan.clone());
        let pp = delta_pp_quotient(&model, &l, &ToricDivisor::prime(fan.ray_count(), i))
            .map_err(|e| e.to_string())?;
        let a_over_s = delta_quotient(&fan, &l, &u).map_err(|e| e.to_string())?;
        ensure!(pp == a_over_s, "{name}: Ent/Jt {pp} vs A/S {a_over_s}");
    }
    Ok(())
}

/// Random nonzero effective divisor with small integer coefficients.
fn random_effective(rng: &mut ChaCha8Rng, rays: usize) -> ToricDivisor {
    loop {
        let c: Vec<i64> = (0..rays).map(|_| rng.gen_range(0..=3)).collect();
        if c.iter().any(|&x| x != 0) {
            return div(&c);
        }
    }
}

/// `delta_pp(D) >= delta` and `delta'(D) >= delta` for random effective `D`,
/// and `delta_pp` invariant under scaling `D`.
fn criterion_6() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let zero_rel = |fan: &Fan| ToricDivisor::zero(fan.ray_count());
    for (name, fan) in varieties() {
        let l = minus_k(&fan);
        let model = Model::trivial(fan.clone());
        let delta = delta_search(&fan, &l, 3).map_err(|e| e.to_string())?.delta;
        for _ in 0..20 {
            let d = random_effective(&mut rng, fan.ray_count());
            let pp = delta_pp_quotient(&model, &l, &d).map_err(|e| format!("{name} {d}: {e}"))?;
            ensure!(pp >= delta, "{name} D = {d}: delta_pp {pp} < delta {delta}");
            for c in [ratio(1, 2), int(2), int(3)] {
                let scaled =
                    delta_pp_quotient(&model, &l, &d.scale(&c)).map_err(|e| e.to_string())?;
                ensure!(
                    scaled == pp,
                    "{name} D = {d}: delta_pp({c} D) = {scaled} != {pp}"
                );
            }
            // delta' needs L - tau D big on [0, 1): rescale so tau+ >= 1.
            let tau = pseudo_effective_threshold(&fan, &l, &d).map_err(|e| e.to_string())?;
            let d1 = if tau < int(1) {
                d.scale(&tau)
            } else {
                d.clone()
            };
            let prime = delta_prime_quotient(&model, &l, &d1, &zero_rel(&fan))
                .map_err(|e| format!("{name} {d1}: {e}"))?;
            ensure!(
                prime >= delta,
                "{name} D = {d1}: delta' {prime} < delta {delta}"
            );
        }
    }
    within(Duration::from_secs(60), start)
}

/// Structural checks: pullback invariance under star subdivisions,
/// log-concavity of volume curves, mixed volume symmetry and
/// multilinearity, and `vol(M) = (P^n)` for Zariski decompositions.
fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let bases = varieties();

    for trial in 0..20 {
        let (name, base) = &bases[trial % bases.len()];
        let mut centers = Vec::new();
        let mut model = Model::trivial(base.clone());
        for _ in 0..rng.gen_range(1..=2) {
            let fan = model.fan();
            let cone = &fan.cones()[rng.gen_range(0..fan.cones().len())];
            let u = cone
                .iter()
                .fold(lv(&[0, 0]), |acc, &i| acc.add(&fan.rays()[i]));
            centers.push(u);
            model = Model::new(base.clone(), &centers).map_err(|e| e.to_string())?;
        }
        let y = model.fan();
        let d = random_effective(&mut rng, base.ray_count());
        let pd = model.pullback_from_base(&d).map_err(|e| e.to_string())?;
        let (vb, vy) = (
            big_volume(base, &d).map_err(|e| e.to_string())?,
            big_volume(y, &pd).map_err(|e| e.to_string())?,
        );
        ensure!(vb == vy, "{name} {centers:?}: vol {vb} vs {vy}");
        let e: Vec<i64> = (0..base.ray_count())
            .map(|_| rng.gen_range(-2..=2))
            .collect();
        let (d1, d2) = (d.clone(), div(&e));
        let on_base =
            intersection_number(base, &[d1.clone(), d2.clone()]).map_err(|e| e.to_string())?;
        let pulled = [
            model.pullback_from_base(&d1).map_err(|e| e.to_string())?,
            model.pullback_from_base(&d2).map_err(|e| e.to_string())?,
        ];
        let on_model = intersection_number(y, &pulled).map_err(|e| e.to_string())?;
        ensure!(
            on_base == on_model,
            "{name} {centers:?}: ({d1}.{d2}) = {on_base} vs {on_model}"
        );
    }

    let families = [
        ("P2", p2(), div(&[0, 0, 1])),
        ("F1", f1(), div(&[0, 0, 0, 1])),
        ("P1xP1", p1xp1(), div(&[1, 1, 0, 0])),
    ];
    for (name, fan, d) in families {
        let vc = volume_curve(&fan, &minus_k(&fan), &d).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let mut a = vc.tau_plus.clone() * ratio(rng.gen_range(0..=999), 1000);
            let mut b = vc.tau_plus.clone() * ratio(rng.gen_range(0..=999), 1000);
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            let m = (&a + &b) / int(2);
            let (va, vm, vb) = (vc.eval(&a), vc.eval(&m), vc.eval(&b));
            ensure!(
                &vm * &vm >= va * vb,
                "{name}: log-concavity fails at ({a}, {m}, {b})"
            );
        }
    }

    let random_polygon = |rng: &mut ChaCha8Rng| -> Polytope {
        loop {
            let pts: Vec<Vec<Rational>> = (0..rng.gen_range(3..=5))
                .map(|_| vec![int(rng.gen_range(-3..=3)), int(rng.gen_range(-3..=3))])
                .collect();
            if let Ok(p) = Polytope::from_points(2, &pts) {
                if p.is_full_dimensional() {
                    return p;
                }
            }
        }
    };
    for _ in 0..10 {
        let (p, q, r) = (
            random_polygon(&mut rng),
            random_polygon(&mut rng),
            random_polygon(&mut rng),
        );
        let mv = |a: &Polytope, b: &Polytope| {
            mixed_volume(&[a.clone(), b.clone()]).map_err(|e| e.to_string())
        };
        ensure!(mv(&p, &q)? == mv(&q, &p)?, "mixed volume not symmetric");
        let pq = Polytope::minkowski_sum(&[&p, &q]).map_err(|e| e.to_string())?;
        ensure!(
            mv(&pq, &r)? == mv(&p, &r)? + mv(&q, &r)?,
            "mixed volume not additive"
        );
        let c = ratio(rng.gen_range(1..=5), rng.gen_range(1..=3));
        ensure!(
            mv(&p.scaled(&c), &r)? == c * mv(&p, &r)?,
            "mixed volume not homogeneous"
        );
        ensure!(mv(&p, &p)? == p.volume() * int(2), "MV(P, P) != 2 vol(P)");
    }

    // Two blow-ups of P^2 carry non-nef effective classes.
    let y = Model::new(p2(), &[lv(&[1, 1]), lv(&[2, 1])])
        .map_err(|e| e.to_string())?
        .fan()
        .clone();
    let mut non_nef = 0;
    for _ in 0..30 {
        let m = random_effective(&mut rng, y.ray_count());
        let z = zariski_decompose(&y, &m).map_err(|e| e.to_string())?;
        let vol = big_volume(&y, &m).map_err(|e| e.to_string())?;
        let pn = intersection_number(&y, &[z.positive.clone(), z.positive.clone()])
            .map_err(|e| e.to_string())?;
        ensure!(vol == pn, "M = {m}: vol {vol} vs (P^2) {pn}");
        ensure!(
            z.positive.add(&z.negative).as_ref() == Ok(&m),
            "M = {m}: P + N != M"
        );
        non_nef += usize::from(!z.negative.is_zero());
    }
    ensure!(non_nef > 0, "no non-nef samples drawn");
    Ok(())
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 delta(P2, -K) = 1", criterion_1),
        ("2 delta(Bl P2, -K) = 6/7 at (1,1)", criterion_2),
        ("3 P2 H-family functionals", criterion_3),
        ("4 delta'(P2, 3H, H) = 15/7", criterion_4),
        ("5 identity suite", criterion_5),
        ("6 inequality suite", criterion_6),
        ("7 structural suite", criterion_7),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let took = start.elapsed();
        match outcome {
            Ok(()) => println!("PASS criterion {name} ({took:.2?})"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name} ({took:.2?}): {why}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
