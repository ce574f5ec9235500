//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::random_hermitian;
use spinpow::angular::wigner_6j;
use spinpow::catalog::KnownGate;
use spinpow::criticality::certify;
use spinpow::distribution::{extrema, grid_angles, husimi_decomposition, reference_distribution, Distribution, ReferenceCase};
use spinpow::geometry::{dagger_gap, ep_geometric, hyperplane_residuals, invariant_vector, m_vector, Basis, UnitaryGate};
use spinpow::haar::{average_ep_analytic, average_ep_from_dims, average_ep_mc, haar_sample};
use spinpow::linalg::{c, kron, re, trace_product, CMatrix, CVector};
use spinpow::operators::{coupled_state, operator_m, operator_n, space};
use spinpow::oracle::{ep_quadrature, linear_entropy, spin_coherent, QuadratureSpec};
use spinpow::optimize::{optimize_ep, OptimizerConfig};
use spinpow::schmidt::{schmidt_spectrum, schmidt_transport_check, spectrum_distance};
use spinpow::verify::{haar_average_reference, m_vector_reference, m_vector_t_reference, n_vector_t_reference};
use spinpow::{HalfInt, Result};

const SEED: u64 = 2024;

fn h(twice: i32) -> HalfInt {
    HalfInt::from_twice(twice)
}

fn pairs() -> Vec<(HalfInt, i32)> {
    (2..=5).flat_map(|t| (1..=t / 2).map(move |q| (h(t), q))).collect()
}

fn worst(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Outcome of one criterion: pass flag and a one-line summary.
struct Outcome {
    pass: bool,
    detail: String,
}

fn within(value: f64, tol: f64, what: &str) -> Outcome {
    Outcome { pass: value < tol, detail: format!("{what} {value:.2e} (tol {tol:e})") }
}

fn all(parts: Vec<Outcome>) -> Outcome {
    Outcome { pass: parts.iter().all(|o| o.pass), detail: parts.into_iter().map(|o| o.detail).collect::<Vec<_>>().join("; ") }
}

fn table_one() -> Result<Outcome> {
    let mut dev: f64 = 0.0;
    for (j, q, expected) in m_vector_reference() {
        dev = dev.max(worst(&m_vector(j, q)?.components, &expected));
        dev = dev.max(worst(&invariant_vector(&operator_m(j, q)?, Basis::P).components, &expected));
    }
    Ok(within(dev, 1e-12, "max deviation over 6 rows"))
}

fn table_three() -> Result<Outcome> {
    let mut dev: f64 = 0.0;
    for (j, expected) in n_vector_t_reference() {
        dev = dev.max(worst(&invariant_vector(&operator_n(j), Basis::T).components, &expected));
    }
    for (j, q, expected) in m_vector_t_reference() {
        dev = dev.max(worst(&invariant_vector(&operator_m(j, q)?, Basis::T).components, &expected));
    }
    Ok(within(dev, 1e-12, "max deviation over 10 rows"))
}

fn extremal_values() -> Result<Outcome> {
    let (mut geo, mut quad): (f64, f64) = (0.0, 0.0);
    for gate in KnownGate::ALL {
        let u = gate.gate();
        let spec = QuadratureSpec::default_for(u.j());
        geo = geo.max((ep_geometric(&u, gate.q())? - gate.expected_ep()).abs());
        quad = quad.max((ep_quadrature(&u, gate.q(), &spec)?.value - gate.expected_ep()).abs());
    }
    Ok(all(vec![within(geo, 1e-12, "geometric"), within(quad, 1e-9, "quadrature")]))
}

fn oracle_equivalence() -> Result<Outcome> {
    let mut dev: f64 = 0.0;
    for (j, q) in pairs() {
        let spec = QuadratureSpec::default_for(j);
        for i in 0..200 {
            let u = haar_sample(j, SEED, i);
            dev = dev.max((ep_geometric(&u, q)? - ep_quadrature(&u, q, &spec)?.value).abs());
        }
    }
    Ok(within(dev, 1e-8, "max |geometric − quadrature| over 1200 gates"))
}

fn haar_averages() -> Result<Outcome> {
    let mut exact: f64 = 0.0;
    for (j, q, value) in haar_average_reference() {
        exact = exact.max((average_ep_analytic(j, q)? - value).abs());
        exact = exact.max((average_ep_from_dims(j, q)? - value).abs());
    }
    let mut zmax: f64 = 0.0;
    for (j, q) in pairs() {
        let mc = average_ep_mc(j, q, 10_000, SEED)?;
        zmax = zmax.max(((mc.mean - average_ep_analytic(j, q)?) / mc.std_error).abs());
    }
    Ok(all(vec![within(exact, 1e-15, "table deviation"), within(zmax, 4.0, "largest |z| of Monte-Carlo means")]))
}

fn criticality() -> Result<Outcome> {
    let mut grad: f64 = 0.0;
    let mut min_zeros = usize::MAX;
    let mut patterns = Vec::new();
    let mut ratio = f64::NAN;
    for gate in KnownGate::ALL {
        let r = certify(&gate.gate(), gate.q(), 1e-9)?;
        grad = grad.max(r.grad_norm);
        min_zeros = min_zeros.min(r.zero_count);
        let groups = r.degeneracies(1e-7);
        let mults: Vec<usize> = groups.iter().map(|g| g.1).collect();
        match gate {
            KnownGate::J1Omega | KnownGate::J1Perm => patterns.push(mults == [2, 6]),
            KnownGate::J32Opt => {
                patterns.push(mults == [4, 5, 6]);
                ratio = groups[0].0 / groups[1].0;
            }
            _ => {}
        }
    }
    Ok(all(vec![
        within(grad, 1e-9, "largest gradient norm"),
        Outcome { pass: patterns.iter().all(|&p| p), detail: format!("degeneracy patterns {patterns:?}") },
        within((ratio - 5.0).abs(), 1e-8, &format!("ratio {ratio:.10}, off by")),
        Outcome { pass: min_zeros >= 6, detail: format!("fewest zero modes {min_zeros}") },
    ]))
}

fn optimizer_recovery() -> Result<Outcome> {
    let limit = Duration::from_secs(120);
    let cases = [(h(2), 1, 0.6, 20, 1e-8), (h(3), 1, 20.0 / 21.0, 20, 1e-8), (h(4), 1, KnownGate::J2Q1.expected_ep(), 50, 1e-6), (h(4), 2, KnownGate::J2Q2.expected_ep(), 50, 1e-6)];
    let mut parts = Vec::new();
    for (j, q, target, restarts, tol) in cases {
        let cfg = OptimizerConfig { restarts, ..OptimizerConfig::for_spin(j, SEED) };
        let start = Instant::now();
        let res = optimize_ep(j, q, &cfg)?;
        let took = start.elapsed();
        // known maxima must be hit, conjectured values met or beaten
        let ok = if j.twice() < 4 { (res.ep - target).abs() < tol } else { res.ep >= target - tol };
        parts.push(Outcome {
            pass: ok && took < limit,
            detail: format!("j={j} q={q}: {:.12} vs {:.12} in {:.1}s", res.ep, target, took.as_secs_f64()),
        });
    }
    Ok(all(parts))
}

fn distribution_closed_forms() -> Result<Outcome> {
    let grid = grid_angles(50, 100);
    let mut closed: f64 = 0.0;
    for (gate, case) in [(KnownGate::J1Perm, ReferenceCase::J1U0prime), (KnownGate::J32Opt, ReferenceCase::J32U0)] {
        let dist = Distribution::new(&gate.gate(), gate.q())?;
        for &(t, p) in &grid {
            closed = closed.max((dist.at(t, p) - reference_distribution(case, t, p)).abs());
        }
    }
    let found = extrema(&KnownGate::J32Opt.gate(), 1, 30, 60)?;
    let lo = found.iter().map(|e| e.value).fold(f64::INFINITY, f64::min);
    let hi = found.iter().map(|e| e.value).fold(f64::NEG_INFINITY, f64::max);
    let range = (lo - 8.0 / 9.0).abs().max((hi - 80.0 / 81.0).abs());
    let d32 = Distribution::new(&KnownGate::J32Opt.gate(), 1)?;
    let d2 = Distribution::new(&KnownGate::J2Q2.gate(), 2)?;
    let affine = grid.iter().map(|&(t, p)| (d2.at(t, p) - (9.0 * d32.at(t, p) - 5.0) / 4.0).abs()).fold(0.0, f64::max);
    Ok(all(vec![
        within(closed, 1e-10, "closed forms"),
        within(range, 1e-9, &format!("range [{lo:.12}, {hi:.12}], off by")),
        within(affine, 1e-10, "affine relation"),
    ]))
}

fn husimi() -> Result<Outcome> {
    let mut cases: Vec<(UnitaryGate, i32)> = KnownGate::ALL.iter().map(|g| (g.gate(), g.q())).collect();
    for (j, q) in pairs() {
        cases.extend((0..20).map(|i| (haar_sample(j, SEED + 1, i), q)));
    }
    let grid = grid_angles(20, 40);
    let (mut point, mut ep): (f64, f64) = (0.0, 0.0);
    for (u, q) in &cases {
        let dec = husimi_decomposition(u, *q)?;
        for &(t, p) in &grid {
            let direct = linear_entropy(&spin_coherent(u.j(), t, p).apply(u), *q)?;
            point = point.max((dec.entanglement_at(t, p) - direct).abs());
        }
        let from_sum = 1.0 - dec.eigenvalues.iter().sum::<f64>() / f64::from(2 * u.j().twice() + 1);
        ep = ep.max((from_sum - ep_geometric(u, *q)?).abs());
    }
    Ok(all(vec![within(point, 1e-9, &format!("{} gates, pointwise", cases.len())), within(ep, 1e-9, "e_p from eigenvalue sum")]))
}

fn dagger() -> Result<Outcome> {
    let mut small: f64 = 0.0;
    for t in [2, 3] {
        for i in 0..500 {
            small = small.max(dagger_gap(&haar_sample(h(t), SEED, i), 1)?.abs());
        }
    }
    let mut big: f64 = 0.0;
    for i in 0..100 {
        let u = haar_sample(h(4), SEED, i);
        big = big.max(dagger_gap(&u, 1)?.abs()).max(dagger_gap(&u, 2)?.abs());
    }
    Ok(all(vec![
        within(small, 1e-10, "largest gap for j ≤ 3/2"),
        Outcome { pass: big > 1e-4, detail: format!("largest gap at j=2 {big:.3e} (needs > 1e-4)") },
    ]))
}

fn decoupled(j: HalfInt, terms: &[(i32, i32, f64)]) -> CVector {
    // (2·m1, 2·m2, amplitude), basis ordered by m descending
    let d = j.dim();
    let idx = |m2x: i32| ((j.twice() - m2x) / 2) as usize;
    let mut v = CVector::zeros(d * d);
    for &(a, b, amp) in terms {
        v[idx(a) * d + idx(b)] += re(amp);
    }
    v
}

fn schmidt() -> Result<Outcome> {
    let (r3, r10, r20) = (3f64.sqrt(), 10f64.sqrt(), 2.0 * 5f64.sqrt());
    let mut spectra = spectrum_distance(&schmidt_spectrum(h(2), h(0), h(0))?, &[1.0 / r3; 3]);
    for m in [-2, 2] {
        spectra = spectra.max(spectrum_distance(&schmidt_spectrum(h(3), h(2), h(m))?, &[2.0 / r10, r3 / r10, r3 / r10, 0.0]));
    }
    spectra = spectra.max(spectrum_distance(&schmidt_spectrum(h(3), h(2), h(0))?, &[3.0 / r20, 3.0 / r20, 1.0 / r20, 1.0 / r20]));

    // the expansions in the product basis
    let singlet = decoupled(h(2), &[(2, -2, 1.0 / r3), (0, 0, -1.0 / r3), (-2, 2, 1.0 / r3)]);
    let psi = (coupled_state(h(2), h(4), h(2))? * re(2f64.sqrt()) - coupled_state(h(2), h(4), h(-4))?) * re(1.0 / r3);
    let psi_product = decoupled(h(2), &[(2, 0, 1.0 / r3), (-2, -2, -1.0 / r3), (0, 2, 1.0 / r3)]);
    let expansions = (coupled_state(h(2), h(0), h(0))? - singlet).norm().max((&psi - psi_product).norm());
    spectra = spectra.max(expansions);

    let mut transport: f64 = (schmidt_transport_check(h(2), &KnownGate::J1Perm.gate(), &psi, &coupled_state(h(2), h(0), h(0))?)? - 1.0).abs();
    let u0 = KnownGate::J32Opt.gate();
    transport = transport.max((schmidt_transport_check(h(3), &u0, &coupled_state(h(3), h(6), h(0))?, &coupled_state(h(3), h(2), h(0))?)? - 1.0).abs());
    // With a real relative sign the side states are not transported; under
    // Condon-Shortley coupling the pair √(3/5)|3,∓2⟩ + i√(2/5)|3,±3⟩ is the one sent onto a
    // |1,·⟩ state, namely |1,∓1⟩.
    let mut real_sign: f64 = 0.0;
    for s in [1, -1] {
        let (a, b) = (coupled_state(h(3), h(6), h(-4 * s))?, coupled_state(h(3), h(6), h(6 * s))?);
        let src = &a * re(0.6f64.sqrt()) + &b * c(0.0, 0.4f64.sqrt());
        transport = transport.max((schmidt_transport_check(h(3), &u0, &src, &coupled_state(h(3), h(2), h(-2 * s))?)? - 1.0).abs());
        let literal = a * re(0.6f64.sqrt()) - b * re(0.4f64.sqrt());
        real_sign = real_sign.max(schmidt_transport_check(h(3), &u0, &literal, &coupled_state(h(3), h(2), h(2 * s))?)?);
    }
    Ok(all(vec![within(spectra, 1e-12, "spectra and expansions"), within(transport, 1e-10, "transports"), Outcome { pass: true, detail: format!("real-sign side states reach {real_sign:.4}") }]))
}

fn identity_suites() -> Result<Outcome> {
    let mut id1: f64 = 0.0;
    let mut rest: f64 = 0.0;
    for t in 1..=5 {
        let j = h(t);
        let sp = space(j);
        let n = sp.n_blocks();
        for s in 0..n {
            for l in 0..n {
                let sign = if (t + l as i32) % 2 == 0 { 1.0 } else { -1.0 };
                let expected = (2 * s + 1) as f64 * sign * wigner_6j(j, j, HalfInt::integer(l as i32), j, j, HalfInt::integer(s as i32));
                let coeff = trace_product(&sp.pair_multipoles[s], &sp.projectors[l]).re / (2 * l + 1) as f64;
                id1 = id1.max((coeff - expected).abs());
            }
        }
        let d2 = j.dim() * j.dim();
        for i in 0..20 {
            let u = haar_sample(j, SEED + 2, i);
            let uu = kron(u.matrix(), u.matrix());
            let ud = uu.adjoint();
            for k in 0..n {
                let mut same = 0.0;
                for l in 0..n {
                    let v = trace_product(&(&uu * &sp.projectors[l] * &ud), &sp.projectors[k]).re;
                    if (l + k) % 2 == 1 {
                        rest = rest.max(v.abs());
                    } else {
                        same += v;
                    }
                }
                rest = rest.max((same - (2 * k + 1) as f64).abs());
            }
            let v: CMatrix = random_hermitian(d2, SEED + i);
            let moved = &uu * &v * &ud;
            let lhs: f64 = sp.pair_multipoles.iter().map(|m| trace_product(&moved, m).re).sum();
            let rhs: f64 = sp.pair_multipoles.iter().map(|m| trace_product(&v, m).re).sum();
            rest = rest.max((lhs - rhs).abs());
            for q in 1..=j.floor() {
                rest = rest.max(hyperplane_residuals(&u, q)?.max());
            }
        }
    }
    Ok(all(vec![within(id1, 1e-10, "multipoles in the projector basis"), within(rest, 1e-10, "parity sums, multipole-sum invariance and hyperplanes")]))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 12] = [
        ("invariant P-vectors of M_q", table_one),
        ("T-basis vectors of N and M_q", table_three),
        ("extremal e_p values", extremal_values),
        ("geometric vs quadrature oracle", oracle_equivalence),
        ("Haar averages", haar_averages),
        ("criticality certificates", criticality),
        ("optimizer recovery", optimizer_recovery),
        ("distribution closed forms", distribution_closed_forms),
        ("Husimi reconstruction", husimi),
        ("dagger symmetry", dagger),
        ("Schmidt spectra", schmidt),
        ("identity suites", identity_suites),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check().unwrap_or_else(|e| Outcome { pass: false, detail: format!("error: {e}") });
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{tag} {:>2}. {name}: {} [{:.1}s]", k + 1, outcome.detail, start.elapsed().as_secs_f64());
        failed += usize::from(!outcome.pass);
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
