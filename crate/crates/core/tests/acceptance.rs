//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! criterion fails.

use std::f64::consts::LN_2;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use sge_core::config::interferometer_segments;
use sge_core::harness::{bch_check, compare_with_oracle, default_bch_setup, equal_superposition, Scenario};
use sge_core::observables::{entanglement_entropy, mixed_density_z, position_density_z, peak_separation, spin_rdm};
use sge_core::oracle::matrix_exponential;
use sge_core::spin_algebra::{build_spin_matrices, conjugate_series, max_abs};
use sge_core::tolerances as tol;
use sge_core::{CMatrix, ExperimentConfig, HybridState, QuadExpPacket, SpinQN, C64};

type Check = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Check);

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn rel(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

fn scaled_product(cfg: &ExperimentConfig, spin: SpinQN, k0: f64) -> HybridState {
    let z = QuadExpPacket::from_gaussian(1.0, 0.0, k0).unwrap();
    let x = QuadExpPacket::from_gaussian(1.0, 0.0, 0.0).unwrap();
    let y = QuadExpPacket::from_gaussian(1.0, 0.0, cfg.beam_wavenumber()).unwrap();
    HybridState::new(spin, equal_superposition(spin), vec![z; spin.dim()], x, y).unwrap()
}

fn bch_factorization() -> Check {
    let start = Instant::now();
    let (grid, cfg, t) = default_bch_setup(64).map_err(err)?;
    let mut pass = true;
    let mut detail = Vec::new();
    for spin in [SpinQN::half(), SpinQN::new(2)] {
        let b = bch_check(&grid, spin, t, &cfg).map_err(err)?;
        pass &= b.passes(tol::BCH_MAX_ENTRY);
        detail.push(format!(
            "s={spin}: max|ΔU|={:.3e} (resolved probes {:.3e})",
            b.full_max_error, b.resolved_max_error
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(30);
    detail.push(format!("tol {:.0e}, {:.1}s", tol::BCH_MAX_ENTRY, elapsed.as_secs_f64()));
    Ok((pass, detail.join("; ")))
}

fn oracle_agreement() -> Check {
    let start = Instant::now();
    let sc = Scenario::silver_sge();
    let coarse = compare_with_oracle(&sc, 4096).map_err(err)?;
    let fine = compare_with_oracle(&sc, 8192).map_err(err)?;
    let ratio = coarse.wavefunction_rel_l2 / fine.wavefunction_rel_l2;
    let elapsed = start.elapsed();
    let pass = coarse.density_rel_l2 <= tol::ORACLE_DENSITY_REL_L2
        && (ratio / tol::STRANG_RATIO - 1.0).abs() <= tol::STRANG_RATIO_SLACK
        && elapsed < Duration::from_secs(60);
    Ok((
        pass,
        format!(
            "density L2 {:.3e} (tol {:.0e}); splitting error {:.3e} -> {:.3e}, ratio {ratio:.3}; {:.1}s",
            coarse.density_rel_l2,
            tol::ORACLE_DENSITY_REL_L2,
            coarse.wavefunction_rel_l2,
            fine.wavefunction_rel_l2,
            elapsed.as_secs_f64()
        ),
    ))
}

fn deflection() -> Check {
    let mut worst: f64 = 0.0;
    let scaled = ExperimentConfig::scaled(1.3, 0.4, 0.9);
    for (cfg, st, t) in [
        (scaled, scaled_product(&scaled, SpinQN::new(3), 0.0), 1.7),
        (ExperimentConfig::silver(), Scenario::silver_sge().initial_state().map_err(err)?, ExperimentConfig::silver().transit_time()),
    ] {
        let out = st.evolve(t, &cfg).map_err(err)?;
        for (i, p) in out.z_packets.iter().enumerate() {
            let m = st.spin.m(i);
            if m == 0.0 {
                continue;
            }
            let want = cfg.gamma() * cfg.beta * m * cfg.hbar * t * t / (2.0 * cfg.mass);
            worst = worst.max(rel(p.moments(cfg.hbar).centroid, want));
        }
    }
    let sc = Scenario::silver_sge();
    let fin = sc.final_state().map_err(err)?;
    let dz = fin.z_packets[0].center().abs();
    let sep = peak_separation(&position_density_z(&fin, &sc.grid).map_err(err)?).map_err(err)?;
    let pass = worst <= tol::IDENTITY_REL
        && rel(dz, tol::SILVER_DEFLECTION_M) <= tol::SILVER_DEFLECTION_REL
        && rel(sep, tol::SILVER_SEPARATION_M) <= tol::SILVER_DEFLECTION_REL;
    Ok((
        pass,
        format!(
            "identity rel err {worst:.2e}; silver t={:.5e}s |Δz|={dz:.4e} m, peak separation {sep:.4e} m",
            sc.cfg.transit_time()
        ),
    ))
}

fn momentum_kick() -> Check {
    let mut worst: f64 = 0.0;
    let scaled = ExperimentConfig::scaled(0.8, 1.1, -0.6);
    let silver = ExperimentConfig::silver();
    for (cfg, st, t) in [
        (scaled, scaled_product(&scaled, SpinQN::new(2), 0.7), 2.3),
        (scaled, scaled_product(&scaled, SpinQN::new(5), -1.1), 0.9),
        (silver, Scenario::silver_sge().initial_state().map_err(err)?, silver.transit_time()),
    ] {
        let out = st.evolve(t, &cfg).map_err(err)?;
        for i in 0..st.spin.dim() {
            let m = st.spin.m(i);
            let k0 = st.z_packets[i].wavenumber();
            let want = cfg.hbar * k0 + cfg.hbar * m * cfg.gamma() * cfg.beta * t;
            let got = out.z_packets[i].moments(cfg.hbar).mean_momentum;
            if want != 0.0 {
                worst = worst.max(rel(got, want));
            } else if got != 0.0 {
                worst = f64::INFINITY;
            }
        }
    }
    Ok((worst <= tol::IDENTITY_REL, format!("worst rel err {worst:.2e} (tol {:.0e})", tol::IDENTITY_REL)))
}

fn broadening() -> Check {
    let cfg = ExperimentConfig::silver();
    let st = Scenario::silver_sge().initial_state().map_err(err)?;
    let sigma0 = st.z_packets[0].width();
    let mut worst: f64 = 0.0;
    for k in 0..=64 {
        let t = cfg.transit_time() * k as f64 / 64.0;
        let out = st.evolve(t, &cfg).map_err(err)?;
        for p in &out.z_packets {
            worst = worst.max(p.width() / sigma0 - 1.0);
        }
    }
    let unit = ExperimentConfig::scaled(1.0, 0.0, 0.0);
    let var = QuadExpPacket::from_gaussian(1.0, 0.0, 0.0)
        .and_then(|p| p.free_evolve(2.0, unit.mass, unit.hbar))
        .map_err(err)?
        .moments(unit.hbar)
        .variance;
    let pass = worst <= tol::SILVER_BROADENING && (var - 2.0).abs() <= tol::IDENTITY_REL;
    Ok((pass, format!("silver max σ(t)/σ−1 = {worst:.3e}; unit variance at t=2: {var:.15}")))
}

fn entropy_limits() -> Check {
    let product = entanglement_entropy(
        &spin_rdm(&Scenario::silver_sge().initial_state().map_err(err)?).map_err(err)?,
    )
    .map_err(err)?;
    let separated = entanglement_entropy(
        &spin_rdm(&Scenario::silver_sge().final_state().map_err(err)?).map_err(err)?,
    )
    .map_err(err)?;
    let mut pass = product.abs() <= tol::ENTROPY_PRODUCT && (separated - LN_2).abs() <= tol::ENTROPY_SEPARATED;
    let mut detail = vec![format!("product {product:.2e}"), format!("spin-1/2 separated {:.2e} off ln2", separated - LN_2)];
    let cfg = ExperimentConfig::scaled(1.0, 0.0, 0.0);
    for spin in [SpinQN::new(2), SpinQN::new(3)] {
        let base = scaled_product(&cfg, spin, 0.0);
        let z: Vec<QuadExpPacket> = (0..spin.dim())
            .map(|i| QuadExpPacket::from_gaussian(1.0, 40.0 * i as f64, 0.0).unwrap())
            .collect();
        let st = HybridState::new(spin, base.coeffs, z, base.x_packet, base.y_packet).map_err(err)?;
        let s = entanglement_entropy(&spin_rdm(&st).map_err(err)?).map_err(err)?;
        let want = (spin.dim() as f64).ln();
        pass &= (s - want).abs() <= tol::ENTROPY_ORTHOGONAL;
        detail.push(format!("s={spin} {:.2e} off ln{}", s - want, spin.dim()));
    }
    Ok((pass, detail.join("; ")))
}

fn pure_vs_mixed() -> Check {
    let sc = Scenario::silver_sge();
    let fin = sc.final_state().map_err(err)?;
    let pure = position_density_z(&fin, &sc.grid).map_err(err)?;
    let branch = |i: usize| -> Result<HybridState, String> {
        let mut c = vec![C64::from(0.0); 2];
        c[i] = C64::from(1.0);
        sc.initial_state()
            .and_then(|st| HybridState::new(st.spin, c, st.z_packets, st.x_packet, st.y_packet))
            .and_then(|st| st.evolve_segments(&sc.segments, &sc.cfg))
            .map_err(err)
    };
    let mixed = mixed_density_z(&[(0.5, branch(0)?), (0.5, branch(1)?)], &sc.grid).map_err(err)?;
    let diff = pure.values.iter().zip(&mixed.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let relative = diff / pure.peak();
    Ok((relative <= tol::PURE_VS_MIXED, format!("max pointwise diff / peak = {relative:.2e}")))
}

fn cox_expansion() -> Check {
    let mut worst: f64 = 0.0;
    for spin in [SpinQN::half(), SpinQN::new(2), SpinQN::new(3)] {
        let s = build_spin_matrices(spin, 1.0);
        let i = C64::new(0.0, 1.0);
        let generators: [CMatrix; 3] = [&s.sz * i, (&s.sx + &s.sz * C64::from(0.5)) * i, &s.sx * &s.sy + &s.sz];
        for a in generators {
            let x = C64::from(0.2 / a.norm());
            let exact = matrix_exponential(&a, x).map_err(err)?
                * &s.sy
                * matrix_exponential(&a, -x).map_err(err)?;
            let series = conjugate_series(&a, &s.sy, x, 12).map_err(err)?;
            worst = worst.max(max_abs(&(series - exact)));
        }
    }
    Ok((worst <= tol::COX_SERIES, format!("order 12, ‖xA‖_F = 0.2: max err {worst:.2e}")))
}

fn interferometer() -> Check {
    let mut sc = Scenario::silver_sge();
    let t_arm = sc.cfg.transit_time() / 2.0;
    sc.segments = interferometer_segments(sc.cfg.beta, t_arm).map_err(err)?;
    let initial = sc.initial_state().map_err(err)?;
    let fin = sc.final_state().map_err(err)?;
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        let arm = (sc.cfg.hbar * sc.spin.m(i) * sc.cfg.gamma() * sc.cfg.beta * t_arm).abs();
        let net = sc.cfg.hbar * (fin.z_packets[i].wavenumber() - initial.z_packets[i].wavenumber());
        worst = worst.max(net.abs() / arm);
    }
    let entropy = entanglement_entropy(&spin_rdm(&fin).map_err(err)?).map_err(err)?;
    let oracle = compare_with_oracle(&sc, 4096).map_err(err)?;
    let pass = worst <= tol::INTERFEROMETER_KICK_REL
        && entropy <= tol::ENTROPY_RECOMBINED
        && oracle.density_rel_l2 <= tol::ORACLE_DENSITY_REL_L2;
    Ok((
        pass,
        format!(
            "T={t_arm:.4e}s: net kick rel {worst:.2e}, entropy {entropy:.2e}, oracle density L2 {:.2e}",
            oracle.density_rel_l2
        ),
    ))
}

fn factor_commutation() -> Check {
    type Factor = fn(&HybridState, f64, &ExperimentConfig) -> sge_core::Result<HybridState>;
    let factors: [Factor; 3] = [HybridState::apply_u2a, HybridState::apply_u2b, HybridState::apply_u2c];
    let orders = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let scaled = ExperimentConfig::scaled(1.0, 1.0, 0.5);
    let silver = ExperimentConfig::silver();
    let mut worst: f64 = 0.0;
    for (cfg, st, t) in [
        (scaled, scaled_product(&scaled, SpinQN::new(2), 0.4), 0.7),
        (silver, Scenario::silver_sge().initial_state().map_err(err)?, silver.transit_time()),
    ] {
        let run = |order: &[usize; 3]| -> sge_core::Result<HybridState> {
            order.iter().try_fold(st.clone(), |s, &f| factors[f](&s, t, &cfg))
        };
        let reference = run(&orders[0]).map_err(err)?;
        for order in &orders[1..] {
            let other = run(order).map_err(err)?;
            worst = worst.max(reference.spinor_distance(&other).map_err(err)?);
        }
    }
    Ok((worst <= tol::FACTOR_ORDERING, format!("max ‖Δψ‖ over 6 orderings {worst:.2e}")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("bch-factorization", bch_factorization),
        ("oracle-agreement", oracle_agreement),
        ("deflection", deflection),
        ("momentum-kick", momentum_kick),
        ("broadening", broadening),
        ("entropy-limits", entropy_limits),
        ("pure-vs-mixed", pure_vs_mixed),
        ("cox-expansion", cox_expansion),
        ("interferometer", interferometer),
        ("factor-commutation", factor_commutation),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!("[{}] {:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" }, k + 1);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
