//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line.

use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use relay_secrecy::channel::DEFAULT_CLASSIFY_TOL;
use relay_secrecy::gaussian::{derived, inner_caps, outer_caps, param_map, secrecy_capacity_gauss, unit_grid, GaussParamInput};
use relay_secrecy::regions::{enumerate_vertices, FEAS_TOL};
use relay_secrecy::sim::{generate_codebook, run_blocks, simulate, stream_rng, Decoders, Message, Rates, SimConfig, SimMode};
use relay_secrecy::{
    build_joint, classify, delta_gap, evaluate_bounds, mutual_info, scalarize_max, zeta, Aux, AuxInput, ClassTag, Family,
    GaussianRelayParams, JointDist, OptBudget, RelayChannelDMC, Slice, Var,
};
use Var::{S, X, Y, Z};

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pmf(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    // Exponential weights, with occasional zeros.
    let mut v: Vec<f64> = (0..n)
        .map(|_| if rng.random_bool(0.1) { 0.0 } else { -rng.random::<f64>().max(1e-300).ln() })
        .collect();
    if v.iter().all(|&p| p == 0.0) {
        v[rng.random_range(0..n)] = 1.0;
    }
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|p| *p /= s);
    v
}

fn cond_table(rng: &mut impl Rng, rows: usize, n: usize) -> Vec<Vec<f64>> {
    (0..rows).map(|_| pmf(rng, n)).collect()
}

/// `Γ(z|x,s) Γ(y|z,s)`.
fn degraded(rng: &mut impl Rng, nx: usize, ns: usize, ny: usize, nz: usize) -> RelayChannelDMC {
    let z = cond_table(rng, nx * ns, nz);
    let y = cond_table(rng, nz * ns, ny);
    RelayChannelDMC::from_fn(nx, ns, ny, nz, |x, s, yy, zz| z[x * ns + s][zz] * y[zz * ns + s][yy]).unwrap()
}

/// `Γ(y|x,s) Γ(z|y,s)`.
fn reversely_degraded(rng: &mut impl Rng, nx: usize, ns: usize, ny: usize, nz: usize) -> RelayChannelDMC {
    let y = cond_table(rng, nx * ns, ny);
    let z = cond_table(rng, ny * ns, nz);
    RelayChannelDMC::from_fn(nx, ns, ny, nz, |x, s, yy, zz| y[x * ns + s][yy] * z[yy * ns + s][zz]).unwrap()
}

fn general(rng: &mut impl Rng, nx: usize, ns: usize, ny: usize, nz: usize) -> RelayChannelDMC {
    let rows = cond_table(rng, nx * ns, ny * nz);
    RelayChannelDMC::from_fn(nx, ns, ny, nz, |x, s, y, z| rows[x * ns + s][y * nz + z]).unwrap()
}

fn random_aux(rng: &mut impl Rng, nu: usize, ns: usize, nx: usize) -> AuxInput {
    let flat = pmf(rng, nu * ns);
    let p_us = flat.chunks(ns).map(<[f64]>::to_vec).collect();
    let p_x = (0..nu).map(|_| cond_table(rng, ns, nx)).collect();
    AuxInput::new(p_us, p_x).unwrap()
}

/// Entropy oracle over a row-major pmf: marginalizes onto the positions in `keep`.
fn oracle_entropy(sizes: &[usize], pmf: &[f64], keep: &[usize]) -> f64 {
    let mut marg = std::collections::BTreeMap::<Vec<usize>, f64>::new();
    for (cell, &p) in pmf.iter().enumerate() {
        let mut idx = vec![0; sizes.len()];
        let mut rest = cell;
        for k in (0..sizes.len()).rev() {
            idx[k] = rest % sizes[k];
            rest /= sizes[k];
        }
        *marg.entry(keep.iter().map(|&k| idx[k]).collect()).or_default() += p;
    }
    marg.values().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

fn h2(p: f64) -> f64 {
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

fn criterion_1() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let vars = [X, Y, Z, S];
    for case in 0..500 {
        let sizes: Vec<usize> = (0..4).map(|_| rng.random_range(1..=3)).collect();
        let p = pmf(&mut rng, sizes.iter().product());
        let j = JointDist::new(vars.iter().copied().zip(sizes.iter().copied()).collect(), p.clone()).unwrap();
        let mi = |a: &[Var], b: &[Var], c: &[Var]| mutual_info(&j, a, b, c).unwrap();

        // I(X;YZ|S) = I(X;Y|S) + I(X;Z|YS)
        let lhs = mi(&[X], &[Y, Z], &[S]);
        let rhs = mi(&[X], &[Y], &[S]) + mi(&[X], &[Z], &[Y, S]);
        ensure((lhs - rhs).abs() <= 1e-10, || format!("case {case}: MI chain rule {lhs} vs {rhs}"))?;
        // H(XYZ) = H(X) + H(Y|X) + H(Z|XY)
        let h = j.entropy(&[X, Y, Z]).unwrap();
        let chain = j.entropy(&[X]).unwrap() + j.cond_entropy(&[Y], &[X]).unwrap() + j.cond_entropy(&[Z], &[X, Y]).unwrap();
        ensure((h - chain).abs() <= 1e-10, || format!("case {case}: entropy chain rule {h} vs {chain}"))?;

        // I(X;Z|S) against H(XS) + H(ZS) - H(XZS) - H(S) from the raw pmf.
        let o = |keep: &[usize]| oracle_entropy(&sizes, &p, keep);
        let oracle = o(&[0, 3]) + o(&[2, 3]) - o(&[0, 2, 3]) - o(&[3]);
        let got = mi(&[X], &[Z], &[S]);
        ensure((got - oracle.max(0.0)).abs() <= 1e-10, || format!("case {case}: I(X;Z|S) {got} vs oracle {oracle}"))?;

        for (a, b, c) in [(&[X][..], &[Y][..], &[][..]), (&[Y], &[Z, S], &[X]), (&[S], &[Z], &[X, Y])] {
            let v = mi(a, b, c);
            ensure(v >= -1e-12, || format!("case {case}: negative MI {v}"))?;
        }
    }

    let bsc = JointDist::new(vec![(X, 2), (Y, 2)], vec![0.45, 0.05, 0.05, 0.45]).unwrap();
    let v = mutual_info(&bsc, &[X], &[Y], &[]).unwrap();
    ensure((v - (1.0 - h2(0.1))).abs() <= 1e-9 && (v - 0.531004).abs() < 5e-7, || format!("BSC(0.1): {v}"))
}

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for case in 0..100 {
        let d: Vec<usize> = (0..4).map(|_| rng.random_range(2..=3)).collect();
        let ch = degraded(&mut rng, d[0], d[1], d[2], d[3]);
        let c = classify(&ch, DEFAULT_CLASSIFY_TOL);
        let r = c.residuals[&ClassTag::Degraded];
        ensure(c.is(ClassTag::Degraded) && r <= 1e-12, || format!("degraded case {case}: residual {r}"))?;

        let ch = reversely_degraded(&mut rng, d[0], d[1], d[2], d[3]);
        let c = classify(&ch, DEFAULT_CLASSIFY_TOL);
        let r = c.residuals[&ClassTag::ReverselyDegraded];
        ensure(c.is(ClassTag::ReverselyDegraded) && r <= 1e-12, || format!("reversely degraded case {case}: residual {r}"))?;
    }
    Ok(())
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for case in 0..200 {
        let reverse = case % 2 == 1;
        let ch = if reverse {
            reversely_degraded(&mut rng, 2, 2, 2, 2)
        } else {
            general(&mut rng, 2, 2, 2, 2)
        };
        let nu = rng.random_range(1..=3);
        let aux = random_aux(&mut rng, nu, 2, 2);
        let a = Aux::P1(aux.clone());

        let tilde = evaluate_bounds(&a, &ch, Family::TildeIn).unwrap();
        let r_in = evaluate_bounds(&a, &ch, Family::RIn).unwrap();
        for v in enumerate_vertices(&tilde).unwrap() {
            ensure(r_in.contains(&v, FEAS_TOL), || format!("case {case}: TildeIn vertex {v:?} outside RIn"))?;
        }

        let j = build_joint(&aux, &ch).unwrap();
        let delta = delta_gap(&j).unwrap();
        ensure(delta >= -1e-12, || format!("case {case}: delta {delta}"))?;
        if reverse {
            ensure(delta <= 1e-12, || format!("case {case}: delta {delta} on a reversely degraded channel"))?;
        }
        let z = zeta(&j).unwrap();
        let cap = mutual_info(&j, &[X, S], &[Y], &[Z]).unwrap();
        ensure(z <= cap + 1e-12, || format!("case {case}: zeta {z} above I(XS;Y|Z) {cap}"))?;
    }
    Ok(())
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let budget = OptBudget {
        restarts: 64,
        nu: Some(2),
        nv: Some(4),
        ..OptBudget::default()
    };
    for case in 0..20 {
        let ch = degraded(&mut rng, 2, 2, 2, 2);
        let r = scalarize_max(&ch, Family::StochOut, Slice::Full, [0.0, 0.0, 1.0], &budget, case).map_err(|e| e.to_string())?;
        ensure(r.value <= 1e-6, || format!("case {case}: max Re {}", r.value))?;
    }
    Ok(())
}

fn c_oracle(x: f64) -> f64 {
    0.5 * x.ln_1p() / std::f64::consts::LN_2
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let grid = unit_grid(65);
    for case in 0..50 {
        let n1: f64 = rng.random_range(0.1..5.0);
        let n2 = n1 * rng.random_range(1.05..4.0);
        let p1 = rng.random_range(0.1..10.0);
        let rho = (n1 / n2).sqrt();
        let p = GaussianRelayParams::new(n1, n2, rho, p1, 1.0).unwrap();
        let nt1 = derived(&p).ntilde1;
        ensure((nt1 - n1).abs() <= 1e-12, || format!("case {case}: ntilde1 {nt1} vs N1 {n1}"))?;
        for &theta in &grid {
            for &eta in &grid {
                let a = inner_caps(&p, theta, &[eta]).unwrap().re;
                let b = outer_caps(&p, theta, eta).unwrap().re;
                ensure((a - b).abs() <= 1e-12, || format!("case {case}: Re at ({theta}, {eta}): {a} vs {b}"))?;
            }
        }
        let expect = c_oracle(p1 / n1) - c_oracle(p1 / n2);
        for p2 in [0.0, 1.0, 10.0] {
            let q = GaussianRelayParams::new(n1, n2, rho, p1, p2).unwrap();
            let (lo, hi) = secrecy_capacity_gauss(&q);
            ensure((lo - expect).abs() <= 1e-12 && (hi - expect).abs() <= 1e-12, || {
                format!("case {case}, P2={p2}: bounds ({lo}, {hi}) vs {expect}")
            })?;
        }
    }
    Ok(())
}

fn criterion_6() -> Check {
    let grid = unit_grid(101);
    for &a in &grid {
        for &b in &grid {
            // θ = 1 leaves η free and α = 0 leaves β free.
            if a < 1.0 {
                let fwd = param_map(GaussParamInput::ThetaEta { theta: a, eta: b }).map_err(|e| e.to_string())?;
                let back = param_map(GaussParamInput::AlphaBeta {
                    alpha: fwd.alpha,
                    beta: fwd.beta,
                })
                .map_err(|e| e.to_string())?;
                ensure((back.theta - a).abs() <= 1e-12 && (back.eta - b).abs() <= 1e-12, || {
                    format!("(theta, eta) = ({a}, {b}) returns as ({}, {})", back.theta, back.eta)
                })?;
            }
            if a > 0.0 && a * b < 1.0 {
                let fwd = param_map(GaussParamInput::AlphaBeta { alpha: a, beta: b }).map_err(|e| e.to_string())?;
                let back = param_map(GaussParamInput::ThetaEta {
                    theta: fwd.theta,
                    eta: fwd.eta,
                })
                .map_err(|e| e.to_string())?;
                ensure((back.alpha - a).abs() <= 1e-12 && (back.beta - b).abs() <= 1e-12, || {
                    format!("(alpha, beta) = ({a}, {b}) returns as ({}, {})", back.alpha, back.beta)
                })?;
            }
        }
    }
    Ok(())
}

fn binary(py: f64, pz: f64) -> RelayChannelDMC {
    RelayChannelDMC::from_fn(2, 1, 2, 2, |x, _, y, z| {
        let a = if y == x { 1.0 - py } else { py };
        let b = if z == x { 1.0 - pz } else { pz };
        a * b
    })
    .unwrap()
}

/// `k`-ary symmetric channel from `Y = X` to `Z`.
fn noiseless_y_symmetric_z(k: usize, pz: f64) -> RelayChannelDMC {
    RelayChannelDMC::from_fn(k, 1, k, k, |x, _, y, z| {
        if y != x {
            0.0
        } else if z == y {
            1.0 - pz
        } else {
            pz / (k as f64 - 1.0)
        }
    })
    .unwrap()
}

fn criterion_7() -> Check {
    let uniform2 = AuxInput::constant(1, &[0.5, 0.5]).unwrap();

    // Noiseless receiver, single common codeword, four private messages, blind relay.
    let blind = RelayChannelDMC::from_fn(2, 1, 2, 2, |x, _, y, _| if y == x { 0.5 } else { 0.0 }).unwrap();
    let rates = Rates { r0: 0.0, r1: 2.0 / 6.0, r2: 0.0, r: 0.0 };
    let mut cfg = SimConfig::new(6, 3, rates, 0.5, 1, uniform2.clone(), blind).map_err(|e| e.to_string())?;
    cfg.mode = SimMode::ExactEquivocation;
    cfg.trials = 20;
    let r = simulate(&cfg).map_err(|e| e.to_string())?;
    let eq = r.equivocation_rate.unwrap_or(f64::NAN);
    ensure(eq == 2.0 / 6.0, || format!("blind relay equivocation {eq}"))?;

    // Relay sees X exactly and there is no private message: zero errors, zero equivocation.
    let copy = RelayChannelDMC::from_fn(2, 1, 2, 2, |x, _, y, z| if y == x && z == x { 1.0 } else { 0.0 }).unwrap();
    let mut cfg = SimConfig::new(8, 4, Rates::default(), 0.05, 2, uniform2.clone(), copy).map_err(|e| e.to_string())?;
    cfg.mode = SimMode::ExactEquivocation;
    cfg.trials = 20;
    let r = simulate(&cfg).map_err(|e| e.to_string())?;
    ensure(r.err_receiver == 0.0 && r.err_relay == 0.0, || format!("noiseless errors {} / {}", r.err_receiver, r.err_relay))?;
    ensure(r.equivocation_rate == Some(0.0), || format!("noiseless equivocation {:?}", r.equivocation_rate))?;

    // Seed determinism.
    let rates = Rates { r0: 0.25, r1: 0.25, r2: 0.125, r: 0.125 };
    let mut cfg = SimConfig::new(8, 3, rates, 0.3, 9, uniform2.clone(), binary(0.05, 0.2)).map_err(|e| e.to_string())?;
    cfg.trials = 10;
    let a = serde_json::to_string(&simulate(&cfg).map_err(|e| e.to_string())?).unwrap();
    let b = serde_json::to_string(&simulate(&cfg).map_err(|e| e.to_string())?).unwrap();
    ensure(a == b, || "same seed gave different reports".into())?;

    // Union-bound consistency, trial by trial.
    let book = generate_codebook(&cfg).map_err(|e| e.to_string())?;
    let dec = Decoders::new(&cfg).map_err(|e| e.to_string())?;
    let sz = book.sizes;
    for k in 0..50u64 {
        let mut rng = stream_rng(cfg.seed, k + 1);
        let msgs: Vec<Message> = (1..cfg.b)
            .map(|_| Message {
                t: rng.random_range(0..sz.t),
                j: rng.random_range(0..sz.j),
                l: rng.random_range(0..sz.l),
            })
            .collect();
        let c = run_blocks(&book, &dec, &msgs, &mut rng).map_err(|e| e.to_string())?;
        ensure(c.union_violations == 0 && c.receiver <= c.e1a + c.e1b + c.e1c, || format!("trial {k}: {c:?}"))?;
    }

    // Trend: rates at 60% of the evaluated caps on a reversely degraded ternary channel.
    let ch = noiseless_y_symmetric_z(3, 0.3);
    ensure(classify(&ch, DEFAULT_CLASSIFY_TOL).is(ClassTag::ReverselyDegraded), || "trend channel is not reversely degraded".into())?;
    let aux = AuxInput::constant(1, &[1.0 / 3.0; 3]).unwrap();
    let set = evaluate_bounds(&Aux::P1(aux.clone()), &ch, Family::TildeIn).map_err(|e| e.to_string())?;
    let k = |name: &str| set.constant(name).unwrap();
    let j = build_joint(&aux, &ch).unwrap();
    let i_ys = mutual_info(&j, &[Y], &[S], &[]).unwrap();
    let rates = Rates {
        r0: 0.6 * k("I(Y;US)").min(k("I(Z;U|S)")),
        r1: 0.6 * (k("I(X;Y|US)") - k("I(X;Z|US)")),
        r2: 0.6 * k("I(X;Z|US)"),
        r: 0.6 * i_ys,
    };
    let mut means = Vec::new();
    for n in [6, 10, 14] {
        let mut total = 0.0;
        for seed in 0..5 {
            let mut cfg = SimConfig::new(n, 3, rates, 0.3, seed, aux.clone(), ch.clone()).map_err(|e| e.to_string())?;
            cfg.trials = 20;
            total += simulate(&cfg).map_err(|e| e.to_string())?.err_receiver;
        }
        means.push(total / 5.0);
    }
    println!("    receiver error means for n = 6, 10, 14: {means:?}");
    ensure(means.windows(2).all(|w| w[1] <= w[0]), || format!("receiver error not non-increasing: {means:?}"))
}

fn criterion_8() -> Check {
    let rates = Rates { r0: 1.0 / 6.0, r1: 2.0 / 6.0, r2: 1.0 / 6.0, r: 0.0 };
    let aux = AuxInput::constant(1, &[0.5, 0.5]).unwrap();
    let mut cfg = SimConfig::new(6, 3, rates, 0.3, 8, aux, binary(0.05, 0.25)).map_err(|e| e.to_string())?;
    cfg.mode = SimMode::ExactEquivocation;
    cfg.trials = 200;
    let r = simulate(&cfg).map_err(|e| e.to_string())?;
    ensure(r.sizes.l == 4, || format!("|L| = {}", r.sizes.l))?;
    let eq = r.equivocation_rate.ok_or("no equivocation")?;
    let bound = r.plugin_lower_bound.ok_or("no plug-in bound")?;
    println!("    exact equivocation {eq:.6}, plug-in bound {bound:.6}");
    ensure((0.0..=2.0 / 6.0).contains(&eq), || format!("equivocation {eq} outside [0, 1/3]"))?;
    ensure(eq >= bound, || format!("equivocation {eq} below bound {bound}"))
}

fn main() -> std::process::ExitCode {
    let criteria: [(&str, fn() -> Check, Duration); 8] = [
        ("1 information measures", criterion_1, Duration::from_secs(10)),
        ("2 channel classification", criterion_2, Duration::from_secs(5)),
        ("3 fixed-input invariants", criterion_3, Duration::from_secs(30)),
        ("4 degraded channels have no secrecy", criterion_4, Duration::from_secs(120)),
        ("5 Gaussian bounds coincide", criterion_5, Duration::from_secs(10)),
        ("6 parameter bijection", criterion_6, Duration::from_secs(1)),
        ("7 simulator soundness and trend", criterion_7, Duration::from_secs(300)),
        ("8 exact equivocation", criterion_8, Duration::from_secs(120)),
    ];
    let mut failed = Vec::new();
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run().and_then(|()| {
            let t = start.elapsed();
            ensure(t <= limit, || format!("took {t:?}, limit {limit:?}"))
        });
        let t = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {name}: PASS ({t:.2} s)"),
            Err(e) => {
                println!("criterion {name}: FAIL ({t:.2} s): {e}");
                failed.push(name);
            }
        }
    }
    if failed.is_empty() {
        std::process::ExitCode::SUCCESS
    } else {
        println!("failed: {failed:?}");
        std::process::ExitCode::FAILURE
    }
}
