#![allow(dead_code)]

use corrflux::mat::{kron, BipartiteShape, ComplexMatrix, Subsystem, C64};
use corrflux::model::{build_thermal_channels, gibbs_state, BipartiteSystem, JumpChannel, LevelRate, ThermalBathSpec};
use corrflux::random::{random_complex, random_hermitian, random_unitary};
use rand::Rng;
use std::io::Write;

pub const SHAPES: [(usize, usize); 4] = [(2, 2), (2, 3), (3, 2), (3, 3)];

pub fn shape(dims: (usize, usize)) -> BipartiteShape {
    BipartiteShape::new(dims.0, dims.1).unwrap()
}

/// Generic system: random Hermitian H_A, H_B, V and two random jump channels per side.
pub fn random_system<R: Rng>(shape: BipartiteShape, rng: &mut R) -> BipartiteSystem {
    let mut channels = Vec::new();
    for side in [Subsystem::A, Subsystem::B] {
        for k in 0..2 {
            let op = random_complex(shape.local(side), rng).scale_real(0.7);
            let rate = rng.gen_range(0.1..1.0);
            channels.push(JumpChannel::local(shape, &op, rate, side, format!("{side}:rand{k}")).unwrap());
        }
    }
    BipartiteSystem::new(
        shape,
        random_hermitian(shape.d_a, 1.0, rng),
        random_hermitian(shape.d_b, 1.0, rng),
        random_hermitian(shape.total(), 0.5, rng),
        channels,
    )
    .unwrap()
}

/// Ascending random spectrum with gaps of at least 0.2.
pub fn random_spectrum<R: Rng>(d: usize, rng: &mut R) -> Vec<f64> {
    let mut e = Vec::with_capacity(d);
    let mut x = rng.gen_range(-1.5..-0.5);
    for _ in 0..d {
        e.push(x);
        x += rng.gen_range(0.2..1.2);
    }
    e
}

fn rotated(u: &ComplexMatrix, diag: &[f64]) -> ComplexMatrix {
    &(u * &ComplexMatrix::from_real_diag(diag)) * &u.dagger()
}

pub struct ThermalInstance {
    pub sys: BipartiteSystem,
    pub beta_a: f64,
    pub beta_b: f64,
    pub steady: ComplexMatrix,
}

/// Thermal baths on both sides with `[H_A + H_B, V] = 0`: V is built from
/// products of eigenprojectors of randomly rotated local Hamiltonians.
pub fn random_thermal<R: Rng>(shape: BipartiteShape, rng: &mut R) -> ThermalInstance {
    let ua = random_unitary(shape.d_a, rng);
    let ub = random_unitary(shape.d_b, rng);
    let h_a = rotated(&ua, &random_spectrum(shape.d_a, rng)).hermitian_part();
    let h_b = rotated(&ub, &random_spectrum(shape.d_b, rng)).hermitian_part();
    let mut v = ComplexMatrix::zeros(shape.total());
    for i in 0..shape.d_a {
        let pa = ComplexMatrix::outer(&ua.column(i), &ua.column(i));
        for j in 0..shape.d_b {
            let pb = ComplexMatrix::outer(&ub.column(j), &ub.column(j));
            v.add_scaled(C64::new(rng.gen_range(-0.5..0.5), 0.0), &kron(&pa, &pb));
        }
    }
    let v = v.hermitian_part();
    let beta_a = rng.gen_range(0.0..2.0);
    let beta_b = rng.gen_range(0.0..2.0);
    let mut channels = Vec::new();
    for (side, h, beta) in [(Subsystem::A, &h_a, beta_a), (Subsystem::B, &h_b, beta_b)] {
        let d = h.dim();
        let mut base_rates = Vec::new();
        for m in 0..d {
            for n in (m + 1)..d {
                let (from, to) = if rng.gen_bool(0.5) { (n, m) } else { (m, n) };
                base_rates.push(LevelRate { from, to, rate: rng.gen_range(0.1..1.0) });
            }
        }
        channels.extend(build_thermal_channels(h, &ThermalBathSpec { beta, base_rates }, side, shape).unwrap());
    }
    let steady = kron(&gibbs_state(&h_a, beta_a).unwrap(), &gibbs_state(&h_b, beta_b).unwrap());
    let sys = BipartiteSystem::new(shape, h_a, h_b, v, channels).unwrap();
    ThermalInstance { sys, beta_a, beta_b, steady }
}

/// Diagonal H_A, H_B, V with diagonal real (Hermitian, commuting) jump operators.
pub fn random_dephasing<R: Rng>(shape: BipartiteShape, rng: &mut R) -> BipartiteSystem {
    let diag = |d: usize, rng: &mut R, scale: f64| -> Vec<f64> { (0..d).map(|_| rng.gen_range(-scale..scale)).collect() };
    let h_a = ComplexMatrix::from_real_diag(&diag(shape.d_a, rng, 1.0));
    let h_b = ComplexMatrix::from_real_diag(&diag(shape.d_b, rng, 1.0));
    let v = ComplexMatrix::from_real_diag(&diag(shape.total(), rng, 0.5));
    let mut channels = Vec::new();
    for side in [Subsystem::A, Subsystem::B] {
        for k in 0..2 {
            let op = ComplexMatrix::from_real_diag(&diag(shape.local(side), rng, 1.0));
            channels.push(JumpChannel::local(shape, &op, rng.gen_range(0.1..1.0), side, format!("{side}:deph{k}")).unwrap());
        }
    }
    BipartiteSystem::new(shape, h_a, h_b, v, channels).unwrap()
}

pub fn verdict(id: u32, name: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    // bypass libtest capture so the verdict shows up in plain `cargo test` output
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {id} [{tag}] {name}: {detail}");
    let _ = out.flush();
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}
