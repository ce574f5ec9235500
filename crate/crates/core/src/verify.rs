//! Self-checks grouped by scope, with one JSON-serializable record per check.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::angular::wigner_6j;
use crate::catalog::KnownGate;
use crate::criticality::{certify, certify_with, Classification, DEFAULT_ZERO_TOL};
use crate::distribution::{extrema, reference_distribution, grid_angles, husimi_decomposition, Distribution, ExtremumKind, ReferenceCase};
use crate::error::{Result, SpinError};
use crate::geometry::{cartan_j1, dagger_gap, ep_closed_small, ep_geometric, ep_j1_trace_form, hyperplane_residuals, invariant_vector, m_vector, Basis, UnitaryGate};
use crate::haar::{average_ep_analytic, haar_matrix, haar_sample, stream_rng};
use crate::halfint::HalfInt;
use crate::linalg::{kron, max_abs_diff, re, trace_product, CMatrix, CVector};
use crate::operators::{basis_transform_tp, coupled_state, operator_m, operator_m_from_factorials, operator_m_from_multipoles, operator_n, space};
use crate::oracle::{ep_quadrature, linear_entropy_with, purity, QuadratureSpec, ReductionMethod, SpinState};
use crate::schmidt::{schmidt_spectrum, schmidt_transport_check, spectrum_distance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    Tables,
    Identities,
    Oracle,
    Extremals,
    All,
}

impl Scope {
    fn includes(self, other: Scope) -> bool {
        self == Scope::All || self == other
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::Tables => "tables",
            Scope::Identities => "identities",
            Scope::Oracle => "oracle",
            Scope::Extremals => "extremals",
            Scope::All => "all",
        })
    }
}

impl FromStr for Scope {
    type Err = SpinError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tables" => Ok(Scope::Tables),
            "identities" => Ok(Scope::Identities),
            "oracle" => Ok(Scope::Oracle),
            "extremals" => Ok(Scope::Extremals),
            "all" => Ok(Scope::All),
            _ => Err(SpinError::Domain(format!("unknown verify scope '{s}'"))),
        }
    }
}

/// How `computed` is compared with `expected`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|computed − expected| ≤ tolerance`
    Eq,
    /// `computed ≤ expected + tolerance`
    Le,
    /// `computed ≥ expected − tolerance`
    Ge,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub scope: Scope,
    pub name: String,
    pub relation: Relation,
    pub computed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub scope: Scope,
    pub seed: u64,
    pub passed: bool,
    pub total: usize,
    pub failed: usize,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Replaces the built-in tolerance of every `Eq` check when set.
    pub tol: Option<f64>,
    /// Haar gates per `(j, q)` in the oracle scope.
    pub oracle_samples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { seed: 0, tol: None, oracle_samples: 20 }
    }
}

struct Sink {
    scope: Scope,
    tol: Option<f64>,
    checks: Vec<Check>,
}

impl Sink {
    fn push(&mut self, name: impl Into<String>, relation: Relation, computed: f64, expected: f64, tolerance: f64) {
        let tolerance = match (relation, self.tol) {
            (Relation::Eq, Some(t)) => t,
            _ => tolerance,
        };
        let pass = match relation {
            Relation::Eq => (computed - expected).abs() <= tolerance,
            Relation::Le => computed <= expected + tolerance,
            Relation::Ge => computed >= expected - tolerance,
        } && computed.is_finite();
        self.checks.push(Check { scope: self.scope, name: name.into(), relation, computed, expected, tolerance, pass });
    }

    fn eq(&mut self, name: impl Into<String>, computed: f64, expected: f64, tolerance: f64) {
        self.push(name, Relation::Eq, computed, expected, tolerance);
    }

    fn vector(&mut self, name: &str, computed: &[f64], expected: &[f64], tolerance: f64) {
        self.eq(format!("{name} length"), computed.len() as f64, expected.len() as f64, 0.0);
        for (k, (a, b)) in computed.iter().zip(expected).enumerate() {
            self.eq(format!("{name}[{k}]"), *a, *b, tolerance);
        }
    }
}

fn h(twice: i32) -> HalfInt {
    HalfInt::from_twice(twice)
}

fn sq(x: f64) -> f64 {
    x.sqrt()
}

/// `(j, q, 𝓜→_q)` in the P basis, closed forms.
pub fn m_vector_reference() -> Vec<(HalfInt, i32, Vec<f64>)> {
    vec![
        (h(2), 1, vec![-2.0, -sq(3.0), sq(5.0)]),
        (h(3), 1, vec![-5.0 / 3.0, -11.0 / (3.0 * sq(3.0)), -sq(5.0) / 3.0, sq(7.0)]),
        (h(4), 1, vec![-1.5, -5.0 * sq(3.0) / 4.0, -3.0 * sq(5.0) / 4.0, 0.0, 3.0]),
        (h(4), 2, vec![-0.25, -sq(3.0) / 2.0, -3.0 * sq(5.0) / 4.0, -sq(7.0) / 2.0, 3.0]),
        (h(5), 1, vec![-1.4, -31.0 * sq(3.0) / 25.0, -23.0 / (5.0 * sq(5.0)), -11.0 * sq(7.0) / 25.0, 0.6, sq(11.0)]),
        (h(5), 2, vec![-0.35, -47.0 * sq(3.0) / 100.0, -31.0 / (10.0 * sq(5.0)), -31.0 * sq(7.0) / 50.0, -0.6, sq(11.0)]),
    ]
}

/// `(j, 𝒩→)` in the T basis, closed forms.
pub fn n_vector_t_reference() -> Vec<(HalfInt, Vec<f64>)> {
    vec![
        (h(2), vec![1.0 / 3.0, 1.0 / (2.0 * sq(3.0)), 1.0 / (6.0 * sq(5.0))]),
        (h(3), vec![0.25, 3.0 * sq(3.0) / 20.0, 1.0 / (4.0 * sq(5.0)), 1.0 / (20.0 * sq(7.0))]),
        (h(4), vec![0.2, 2.0 / (5.0 * sq(3.0)), 2.0 / (7.0 * sq(5.0)), 1.0 / (10.0 * sq(7.0)), 1.0 / 210.0]),
        (h(5), vec![1.0 / 6.0, 5.0 / (14.0 * sq(3.0)), 5.0 * sq(5.0) / 84.0, 5.0 / (36.0 * sq(7.0)), 1.0 / 84.0, 1.0 / (252.0 * sq(11.0))]),
    ]
}

/// `(j, q, 𝓜→_q)` in the T basis, closed forms.
pub fn m_vector_t_reference() -> Vec<(HalfInt, i32, Vec<f64>)> {
    vec![
        (h(2), 1, vec![0.0, 2.0 * sq(3.0), 0.0]),
        (h(3), 1, vec![0.0, 20.0 / (3.0 * sq(3.0)), 0.0, 0.0]),
        (h(4), 1, vec![0.0, 5.0 * sq(3.0) / 2.0, 0.0, 0.0, 0.0]),
        (h(4), 2, vec![0.0, 15.0 * sq(3.0) / 8.0, 7.0 * sq(5.0) / 8.0, 0.0, 0.0]),
        (h(5), 1, vec![0.0, 14.0 * sq(3.0) / 5.0, 0.0, 0.0, 0.0, 0.0]),
        (h(5), 2, vec![0.0, 21.0 * sq(3.0) / 10.0, 21.0 / (5.0 * sq(5.0)), 0.0, 0.0, 0.0]),
    ]
}

/// `(j, q, average)` of `e_p` over the unitary group.
pub fn haar_average_reference() -> Vec<(HalfInt, i32, f64)> {
    vec![(h(2), 1, 0.5), (h(3), 1, 2.0 / 3.0), (h(4), 1, 0.75), (h(4), 2, 2.0 / 3.0)]
}

fn tables(s: &mut Sink) -> Result<()> {
    for (j, q, expected) in m_vector_reference() {
        s.vector(&format!("m_vector_p j={j} q={q}"), &m_vector(j, q)?.components, &expected, 1e-12);
        let direct = invariant_vector(&operator_m(j, q)?, Basis::P);
        s.vector(&format!("m_trace_p j={j} q={q}"), &direct.components, &expected, 1e-12);
    }
    for (j, expected) in n_vector_t_reference() {
        s.vector(&format!("n_vector_t j={j}"), &invariant_vector(&operator_n(j), Basis::T).components, &expected, 1e-12);
        let mut p = vec![0.0; j.twice() as usize + 1];
        *p.last_mut().unwrap() = 1.0 / f64::from(2 * j.twice() + 1).sqrt();
        s.vector(&format!("n_vector_p j={j}"), &invariant_vector(&operator_n(j), Basis::P).components, &p, 1e-12);
    }
    for (j, q, expected) in m_vector_t_reference() {
        s.vector(&format!("m_vector_t j={j} q={q}"), &invariant_vector(&operator_m(j, q)?, Basis::T).components, &expected, 1e-12);
    }
    for (j, q, expected) in haar_average_reference() {
        s.eq(format!("haar_average j={j} q={q}"), average_ep_analytic(j, q)?, expected, 1e-15);
    }
    Ok(())
}

fn random_hermitian(d: usize, seed: u64, stream: u64) -> CMatrix {
    let g = haar_matrix(d, &mut stream_rng(seed, stream));
    let a = CMatrix::from_fn(d, d, |r, c| g[(r, c)] * re((r + 2 * c) as f64 * 0.1 + 0.3));
    (&a + a.adjoint()) * re(0.5)
}

fn identities(s: &mut Sink, seed: u64) -> Result<()> {
    for (a, f) in [(h(2), h(4)), (h(3), h(6)), (h(4), h(2))] {
        // Σ_x (2x+1)(2f+1) {a a x; a a f}² = 1
        let sum: f64 = (0..=a.twice()).map(|x| {
            let w = wigner_6j(a, a, HalfInt::integer(x), a, a, f);
            f64::from(2 * x + 1) * f64::from(f.twice() + 1) * w * w
        }).sum();
        s.eq(format!("six_j_orthogonality j={a} f={f}"), sum, 1.0, 1e-12);
    }
    s.eq("six_j_sum j=1", (0..=2).map(|l| f64::from(2 * l + 1) * wigner_6j(h(2), h(2), h(4), h(2), h(2), HalfInt::integer(l))).sum(), 1.0, 1e-12);
    for tj in 1..=5 {
        let j = h(tj);
        let sp = space(j);
        let d2 = sp.dim() * sp.dim();
        let total = sp.projectors.iter().fold(CMatrix::zeros(d2, d2), |acc, p| acc + p);
        s.eq(format!("completeness j={j}"), max_abs_diff(&total, &CMatrix::identity(d2, d2)), 0.0, 1e-12);

        let tp = basis_transform_tp(j);
        let n = sp.n_blocks();
        s.eq(format!("tp_round_trip j={j}"), (&tp.t_in_p * &tp.p_in_t - nalgebra::DMatrix::<f64>::identity(n, n)).abs().max(), 0.0, 1e-12);
        let mut recon_err: f64 = 0.0;
        for sigma in 0..n {
            let r = (0..n).fold(CMatrix::zeros(d2, d2), |acc, l| acc + &sp.projectors[l] * re(tp.t_in_p[(sigma, l)]));
            recon_err = recon_err.max(max_abs_diff(&r, &sp.pair_multipoles[sigma]));
        }
        s.eq(format!("multipole_from_projectors j={j}"), recon_err, 0.0, 1e-10);

        for q in 1..=j.floor() {
            let m = operator_m(j, q)?;
            let e1 = max_abs_diff(m.matrix(), operator_m_from_multipoles(j, q)?.matrix());
            let e2 = max_abs_diff(m.matrix(), operator_m_from_factorials(j, q)?.matrix());
            s.eq(format!("m_constructions j={j} q={q}"), e1.max(e2), 0.0, 1e-10);
        }

        for k in 0..3u64 {
            let u = haar_sample(j, seed, 100 + k);
            let uu = kron(u.matrix(), u.matrix());
            let uud = uu.adjoint();
            let mut parity: f64 = 0.0;
            let mut sums: f64 = 0.0;
            for kk in 0..n {
                let mut acc = 0.0;
                for l in 0..n {
                    let t = trace_product(&(&uu * &sp.projectors[l] * &uud), &sp.projectors[kk]).re;
                    if (l + kk) % 2 == 1 {
                        parity = parity.max(t.abs());
                    } else {
                        acc += t;
                    }
                }
                sums = sums.max((acc - (2 * kk + 1) as f64).abs());
            }
            s.eq(format!("parity j={j} sample={k}"), parity, 0.0, 1e-10);
            s.eq(format!("parity_sums j={j} sample={k}"), sums, 0.0, 1e-10);

            let v = random_hermitian(d2, seed, 200 + k);
            let moved = &uu * &v * &uud;
            let lhs: f64 = sp.pair_multipoles.iter().map(|t| trace_product(&moved, t).re).sum();
            let rhs: f64 = sp.pair_multipoles.iter().map(|t| trace_product(&v, t).re).sum();
            s.eq(format!("multipole_sum_invariance j={j} sample={k}"), lhs - rhs, 0.0, 1e-10);

            for q in 1..=j.floor() {
                s.eq(format!("hyperplanes j={j} q={q} sample={k}"), hyperplane_residuals(&u, q)?.max(), 0.0, 1e-10);
            }
        }
    }
    Ok(())
}

fn oracle(s: &mut Sink, seed: u64, samples: usize) -> Result<()> {
    for tj in 2..=5 {
        let j = h(tj);
        let spec = QuadratureSpec::default_for(j);
        for q in 1..=j.floor() {
            let mut worst: f64 = 0.0;
            for k in 0..samples as u64 {
                let u = haar_sample(j, seed, k);
                worst = worst.max((ep_geometric(&u, q)? - ep_quadrature(&u, q, &spec)?.value).abs());
            }
            s.eq(format!("geometric_vs_quadrature j={j} q={q} n={samples}"), worst, 0.0, 1e-8);
        }
        let mut red: f64 = 0.0;
        let mut pur: f64 = 0.0;
        for k in 0..5u64 {
            let amps = haar_sample(j, seed, 300 + k).matrix().column(0).into_owned();
            let psi = SpinState::new(j, amps)?;
            for q in 1..tj {
                let ea = linear_entropy_with(&psi, q, ReductionMethod::Multipole)?;
                let eb = linear_entropy_with(&psi, q, ReductionMethod::QubitTrace)?;
                red = red.max((ea - eb).abs());
                let ra = crate::oracle::reduced_state(&psi, q, ReductionMethod::Multipole)?;
                let rb = crate::oracle::reduced_state(&psi, q, ReductionMethod::QubitTrace)?;
                red = red.max(max_abs_diff(&ra, &rb));
                pur = pur.max((purity(&psi, q)? - purity(&psi, tj - q)?).abs());
            }
        }
        s.eq(format!("reduction_methods j={j}"), red, 0.0, 1e-9);
        s.eq(format!("purity_symmetry j={j}"), pur, 0.0, 1e-10);
        if tj <= 4 {
            let mut closed: f64 = 0.0;
            for k in 0..5u64 {
                let u = haar_sample(j, seed, 400 + k);
                for q in 1..=j.floor() {
                    closed = closed.max((ep_closed_small(&u, q)? - ep_geometric(&u, q)?).abs());
                }
                if tj == 2 {
                    closed = closed.max((ep_j1_trace_form(&u)? - ep_geometric(&u, 1)?).abs());
                }
            }
            s.eq(format!("closed_forms j={j}"), closed, 0.0, 1e-12);
        }
    }
    Ok(())
}

fn extremals(s: &mut Sink) -> Result<()> {
    for g in KnownGate::ALL {
        let u = g.gate();
        let spec = QuadratureSpec::default_for(g.j());
        s.eq(format!("ep {g}"), ep_geometric(&u, g.q())?, g.expected_ep(), 1e-12);
        s.eq(format!("ep_quadrature {g}"), ep_quadrature(&u, g.q(), &spec)?.value, g.expected_ep(), 1e-9);
        let rep = certify(&u, g.q(), 1e-9)?;
        s.push(format!("grad_norm {g}"), Relation::Le, rep.grad_norm, 0.0, 1e-9);
        s.push(format!("hessian_zero_count {g}"), Relation::Ge, rep.zero_count as f64, 6.0, 0.0);
        let pos = rep.hessian_eigenvalues.iter().filter(|e| **e >= DEFAULT_ZERO_TOL).count();
        s.eq(format!("hessian_positive_count {g}"), pos as f64, 0.0, 0.0);
        s.eq(format!("is_local_max {g}"), f64::from(u8::from(rep.classification == Classification::Max)), 1.0, 0.0);
    }
    let r1 = certify(&KnownGate::J1Omega.gate(), 1, 1e-9)?;
    let g1 = r1.degeneracies(1e-8);
    s.eq("hessian_groups j1_omega", g1.len() as f64, 2.0, 0.0);
    s.eq("hessian_negative_count j1_omega", g1.first().map_or(0, |g| g.1) as f64, 2.0, 0.0);
    s.eq("hessian_zero_count_exact j1_omega", r1.zero_count as f64, 6.0, 0.0);
    let r3 = certify_with(&KnownGate::J32Opt.gate(), 1, 1e-9, DEFAULT_ZERO_TOL, Some(-8.0))?;
    let g3 = r3.degeneracies(1e-8);
    let counts: Vec<usize> = g3.iter().map(|g| g.1).collect();
    s.vector("hessian_degeneracies j32_opt", &counts.iter().map(|&c| c as f64).collect::<Vec<_>>(), &[4.0, 5.0, 6.0], 0.0);
    if g3.len() >= 2 {
        s.eq("hessian_ratio j32_opt", g3[0].0 / g3[1].0, 5.0, 1e-9);
    }

    let (cg, cep) = cartan_j1(std::f64::consts::FRAC_PI_3, 0.0, -std::f64::consts::FRAC_PI_3)?;
    s.eq("cartan_ep pi/3", cep, 0.6, 1e-12);
    s.eq("cartan_geometric pi/3", ep_geometric(&cg, 1)?, 0.6, 1e-10);
    s.eq("cartan_gate pi/3", max_abs_diff(cg.matrix(), KnownGate::J1Omega.gate().matrix()), 0.0, 1e-12);

    let cases = [(KnownGate::J1Perm, ReferenceCase::J1U0prime, 1), (KnownGate::J32Opt, ReferenceCase::J32U0, 1), (KnownGate::J2Q2, ReferenceCase::J2Q2Affine, 2)];
    for (g, case, q) in cases {
        let d = Distribution::new(&g.gate(), q)?;
        let worst = grid_angles(20, 40).into_iter().map(|(t, p)| (d.at(t, p) - reference_distribution(case, t, p)).abs()).fold(0.0, f64::max);
        s.eq(format!("distribution_closed_form {g}"), worst, 0.0, 1e-10);
    }
    let ex = extrema(&KnownGate::J32Opt.gate(), 1, 30, 60)?;
    let lo = ex.iter().filter(|e| e.kind == ExtremumKind::Min).map(|e| e.value).fold(f64::INFINITY, f64::min);
    let hi = ex.iter().filter(|e| e.kind == ExtremumKind::Max).map(|e| e.value).fold(f64::NEG_INFINITY, f64::max);
    s.eq("distribution_min j32_opt", lo, 8.0 / 9.0, 1e-9);
    s.eq("distribution_max j32_opt", hi, 80.0 / 81.0, 1e-9);
    for g in KnownGate::ALL {
        let dec = husimi_decomposition(&g.gate(), g.q())?;
        s.eq(format!("husimi_ep {g}"), dec.ep(), g.expected_ep(), 1e-12);
    }

    let gap = (0..4u64).map(|k| dagger_gap(&haar_sample(h(3), 7, k), 1)).collect::<Result<Vec<_>>>()?;
    s.eq("dagger_gap j=3/2", gap.iter().fold(0.0f64, |m, x| m.max(x.abs())), 0.0, 1e-10);

    let r3s = 3f64.sqrt();
    let r10 = 10f64.sqrt();
    s.eq("schmidt j=1 L=0", spectrum_distance(&schmidt_spectrum(h(2), h(0), h(0))?, &[1.0 / r3s; 3]), 0.0, 1e-12);
    s.eq("schmidt j=3/2 L=1 M=1", spectrum_distance(&schmidt_spectrum(h(3), h(2), h(2))?, &[2.0 / r10, r3s / r10, r3s / r10, 0.0]), 0.0, 1e-12);
    let r20 = 2.0 * 5f64.sqrt();
    s.eq("schmidt j=3/2 L=1 M=0", spectrum_distance(&schmidt_spectrum(h(3), h(2), h(0))?, &[3.0 / r20, 3.0 / r20, 1.0 / r20, 1.0 / r20]), 0.0, 1e-12);
    let src: CVector = (coupled_state(h(2), h(4), h(2))? * re(2f64.sqrt()) - coupled_state(h(2), h(4), h(-4))?) * re(1.0 / r3s);
    s.eq("transport j1_perm", schmidt_transport_check(h(2), &KnownGate::J1Perm.gate(), &src, &coupled_state(h(2), h(0), h(0))?)?, 1.0, 1e-10);
    s.eq(
        "transport j32_opt",
        schmidt_transport_check(h(3), &KnownGate::J32Opt.gate(), &coupled_state(h(3), h(6), h(0))?, &coupled_state(h(3), h(2), h(0))?)?,
        1.0,
        1e-10,
    );
    s.eq("ep identity j=2 q=2", ep_geometric(&UnitaryGate::identity(h(4)), 2)?, 0.0, 1e-12);
    Ok(())
}

/// Runs every check in `scope`.
pub fn run(scope: Scope, options: &VerifyOptions) -> Result<VerifyReport> {
    let mut all = Vec::new();
    let parts: [(Scope, &dyn Fn(&mut Sink) -> Result<()>); 4] = [
        (Scope::Tables, &tables),
        (Scope::Identities, &|s| identities(s, options.seed)),
        (Scope::Oracle, &|s| oracle(s, options.seed, options.oracle_samples)),
        (Scope::Extremals, &extremals),
    ];
    for (part, f) in parts {
        if scope.includes(part) {
            let mut sink = Sink { scope: part, tol: options.tol, checks: Vec::new() };
            f(&mut sink)?;
            all.extend(sink.checks);
        }
    }
    let failed = all.iter().filter(|c| !c.pass).count();
    Ok(VerifyReport { scope, seed: options.seed, passed: failed == 0, total: all.len(), failed, checks: all })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scope_names_round_trip() {
        for s in [Scope::Tables, Scope::Identities, Scope::Oracle, Scope::Extremals, Scope::All] {
            assert_eq!(s.to_string().parse::<Scope>().unwrap(), s);
        }
        assert!("everything".parse::<Scope>().is_err());
    }

    #[test]
    fn every_scope_passes() {
        let report = run(Scope::All, &VerifyOptions { oracle_samples: 3, ..Default::default() }).unwrap();
        let failures: Vec<_> = report.failures().collect();
        assert!(failures.is_empty(), "{failures:#?}");
        for s in [Scope::Tables, Scope::Identities, Scope::Oracle, Scope::Extremals] {
            assert!(report.checks.iter().any(|c| c.scope == s));
        }
    }

    #[test]
    fn tolerance_override_can_fail_checks() {
        let report = run(Scope::Tables, &VerifyOptions { tol: Some(-1.0), ..Default::default() }).unwrap();
        assert!(!report.passed);
        assert_eq!(report.failed, report.checks.iter().filter(|c| c.relation == Relation::Eq).count());
    }
}
