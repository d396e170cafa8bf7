//! End-to-end acceptance suite. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use isotrans::error::Error;
use isotrans::factor::{symmetric_reduce, transpose_factor, SymmetricForm};
use isotrans::isotropic::{
    isotropy_residual, max_isotropic_dim, normalize_plane, normalize_with_permutation,
    sample_isotropic, NormalizedPlane, Plane,
};
use isotrans::matcore::io::write_matrix;
use isotrans::matcore::random::{random_matrix, random_symmetric_of_rank, seeded};
use isotrans::matcore::{inverse, rank, solve, span_distance};
use isotrans::transport::{
    consistency_identity, group_membership, transport, transport_generic, Strategy,
};
use isotrans::{Matrix, Tolerance, C64};
use rand::Rng;

const RESIDUAL: f64 = 1e-8;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn tol() -> Tolerance {
    Tolerance::default()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `(m, r)` for sweep trial `t`: m cycles through 1..=16, r through 0..=m.
fn sweep_shape(t: usize) -> (usize, usize) {
    let m = 1 + t % 16;
    let r = (t / 16 * 5 + t) % (m + 1);
    (m, r)
}

fn sweep_forms() -> Vec<(Matrix, usize)> {
    (0..200)
        .map(|t| {
            let (m, r) = sweep_shape(t);
            let q = random_symmetric_of_rank(&mut seeded(1_000 + t as u64), m, r);
            (q, r)
        })
        .collect()
}

fn factorization_sweep() -> Outcome {
    let forms = sweep_forms();
    let mut ranks_seen = [false; 17];
    let mut worst = 0.0f64;
    let start = Instant::now();
    for (t, (q, r)) in forms.iter().enumerate() {
        let m = q.rows();
        let form = SymmetricForm::new(q.clone(), tol()).map_err(|e| format!("trial {t}: {e}"))?;
        let tf = transpose_factor(&form).map_err(|e| format!("trial {t}: {e}"))?;
        let defect = (&tf.p.transpose().matmul(&tf.p) - q).norm_fro();
        let bound = RESIDUAL * q.norm_fro().max(1.0) * m as f64;
        worst = worst.max(defect / bound);
        ensure(defect <= bound, || {
            format!("trial {t}: ‖PᵀP − Q‖_F = {defect:.2e} > {bound:.2e}")
        })?;
        let (rp, rq) = (rank(&tf.p, &tol()), rank(q, &tol()));
        ensure(rp == rq && rq == *r, || {
            format!("trial {t}: rank(P) = {rp}, rank(Q) = {rq}, planted {r}")
        })?;
        ranks_seen[*r] = true;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || {
        format!("runtime {elapsed:?} >= 5 s")
    })?;
    let distinct = ranks_seen.iter().filter(|&&s| s).count();
    Ok(format!(
        "200 trials, {distinct} distinct ranks, worst defect {worst:.2e} of bound, {:.2} s",
        elapsed.as_secs_f64()
    ))
}

fn reduction_certificate() -> Outcome {
    let mut worst = 0.0f64;
    for (t, (q, _)) in sweep_forms().iter().enumerate() {
        let m = q.rows();
        let form = SymmetricForm::new(q.clone(), tol()).map_err(|e| format!("trial {t}: {e}"))?;
        let red = symmetric_reduce(&form);
        let target = Matrix::partial_identity(m, red.l);
        let defect = (&red.a.congruence(q) - &target).norm_max();
        let bound = RESIDUAL * q.norm_max() * m as f64;
        if bound > 0.0 {
            worst = worst.max(defect / bound);
        }
        ensure(defect <= bound, || {
            format!("trial {t}: ‖AᵀQA − D‖_max = {defect:.2e} > {bound:.2e}")
        })?;
        ensure(rank(&red.a, &tol()) == m, || {
            format!("trial {t}: A is singular")
        })?;
    }
    Ok(format!("200 trials, worst defect {worst:.2e} of bound"))
}

fn isotropy_bound() -> Outcome {
    let mut successes = 0;
    let mut worst = 0.0f64;
    for m in 1..=10usize {
        let random_form = random_symmetric_of_rank(&mut seeded(77 + m as u64), m, m);
        let forms = [
            SymmetricForm::identity(m, tol()),
            SymmetricForm::new(random_form, tol()).map_err(|e| e.to_string())?,
        ];
        for (f, form) in forms.iter().enumerate() {
            let max = m / 2;
            ensure(max_isotropic_dim(m) == max, || {
                format!("m = {m}: wrong bound")
            })?;
            for k in 1..=max {
                let plane = sample_isotropic(form, k, (m * 100 + k) as u64)
                    .map_err(|e| format!("m = {m}, k = {k}, form {f}: {e}"))?;
                let residual = isotropy_residual(form, &plane).map_err(|e| e.to_string())?;
                worst = worst.max(residual);
                ensure(residual <= 1e-10, || {
                    format!("m = {m}, k = {k}, form {f}: residual {residual:.2e}")
                })?;
                ensure(rank(plane.basis(), &tol()) == k, || {
                    format!("m = {m}, k = {k}: basis not of rank k")
                })?;
                successes += 1;
            }
            match sample_isotropic(form, max + 1, 1) {
                Err(Error::DimensionBound { .. }) => {}
                other => {
                    return Err(format!(
                        "m = {m}, k = {}: expected a bound error, got {other:?}",
                        max + 1
                    ))
                }
            }
        }
    }
    Ok(format!(
        "{successes} samples up to m = 10, worst residual {worst:.2e}, k = m/2 + 1 rejected"
    ))
}

/// Two isotropic planes of the identity form normalized under a common
/// permutation, or `None` when the second is not normalizable under it.
fn normalized_pair(
    m: usize,
    k: usize,
    seed: u64,
) -> Option<(Plane, Plane, NormalizedPlane, NormalizedPlane)> {
    let id = SymmetricForm::identity(m, tol());
    let p1 = sample_isotropic(&id, k, seed).unwrap();
    let p2 = sample_isotropic(&id, k, seed ^ 0x5eed_0000).unwrap();
    let np1 = normalize_plane(&p1, &tol()).ok()?;
    let np2 = normalize_with_permutation(&p2, &np1, &tol()).ok()?;
    Some((p1, p2, np1, np2))
}

fn generic_shape(t: usize) -> (usize, usize) {
    let m = 3 + t % 10;
    let k = 1 + (t / 10) % ((m - 1) / 2);
    (m, k)
}

fn consistency() -> Outcome {
    let mut worst = 0.0f64;
    let mut weakest_control = f64::INFINITY;
    let mut pairs = 0;
    let mut seed = 0u64;
    while pairs < 100 {
        let (m, k) = generic_shape(pairs);
        seed += 1;
        let Some((_, p2, np1, np2)) = normalized_pair(m, k, 40_000 + seed) else {
            continue;
        };
        let residual = consistency_identity(&np1, &np2, &tol()).map_err(|e| e.to_string())?;
        worst = worst.max(residual);
        ensure(residual <= 1e-9, || {
            format!("m = {m}, k = {k}: residual {residual:.2e}")
        })?;

        let mut rng = seeded(90_000 + seed);
        let noise = random_matrix(&mut rng, m, k).scale(C64::new(0.1, 0.0));
        let perturbed = Plane::new(p2.basis() + &noise, &tol()).map_err(|e| e.to_string())?;
        let np_bad =
            normalize_with_permutation(&perturbed, &np1, &tol()).map_err(|e| e.to_string())?;
        let control = consistency_identity(&np1, &np_bad, &tol()).map_err(|e| e.to_string())?;
        weakest_control = weakest_control.min(control);
        ensure(control > 1e-3, || {
            format!("m = {m}, k = {k}: perturbed control only {control:.2e}")
        })?;
        pairs += 1;
    }
    Ok(format!(
        "100 pairs, worst residual {worst:.2e}, weakest control {weakest_control:.2e}"
    ))
}

fn generic_transporter() -> Outcome {
    let mut accepted = 0;
    let mut attempts = 0;
    let mut not_generic = 0;
    let mut worst = [0.0f64; 4];
    while accepted < 100 {
        let (m, k) = generic_shape(accepted);
        attempts += 1;
        let Some((p1, p2, np1, np2)) = normalized_pair(m, k, 70_000 + attempts) else {
            not_generic += 1;
            continue;
        };
        let (map, w) = match transport_generic(&np1, &np2, &tol()) {
            Ok(out) => out,
            Err(Error::NotGeneric(_)) => {
                not_generic += 1;
                continue;
            }
            Err(e) => return Err(format!("m = {m}, k = {k}: {e}")),
        };
        let orth = (&map.a.transpose().matmul(&map.a) - &Matrix::identity(m)).norm_fro();
        let span = span_distance(&map.a.matmul(p1.basis()), p2.basis(), &tol())
            .map_err(|e| e.to_string())?;
        let witness = w
            .first_equation_residual()
            .max(w.second_equation_residual())
            .max(w.redundant_equation_residual());
        for (slot, v) in worst
            .iter_mut()
            .zip([orth, span, witness, w.consistency_residual()])
        {
            *slot = slot.max(v);
        }
        ensure(orth <= RESIDUAL, || {
            format!("m = {m}, k = {k}: ‖AᵀA − I‖_F = {orth:.2e}")
        })?;
        ensure(span <= RESIDUAL, || {
            format!("m = {m}, k = {k}: span distance {span:.2e}")
        })?;
        ensure(witness <= RESIDUAL, || {
            format!("m = {m}, k = {k}: witness residual {witness:.2e}")
        })?;
        accepted += 1;
    }
    Ok(format!(
        "100 pairs, worst ‖AᵀA − I‖_F {:.2e}, span {:.2e}, witness {:.2e}; NotGeneric rate {not_generic}/{attempts}",
        worst[0], worst[1], worst[2]
    ))
}

/// A test pair for the complete transporter.
struct Case {
    label: &'static str,
    q: SymmetricForm,
    p1: Plane,
    p2: Plane,
}

fn random_form(m: usize, seed: u64) -> SymmetricForm {
    SymmetricForm::new(random_symmetric_of_rank(&mut seeded(seed), m, m), tol()).unwrap()
}

/// Pulls an identity-form plane back to `q` through its transpose factor.
fn pull_back(q: &SymmetricForm, basis: &Matrix) -> Plane {
    let p = transpose_factor(q).unwrap().p;
    Plane::new(solve(&p, basis, &tol()).unwrap(), &tol()).unwrap()
}

/// An isotropic plane of the identity form whose rows at `order[..k]` are
/// rank deficient: column 0 lives on two trailing coordinates.
fn singular_block_plane(order: &[usize], m: usize, k: usize, seed: u64) -> Matrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (lead, trail) = order.split_at(k);
    let mut b = Matrix::zeros(m, k);
    b[(trail[0], 0)] = C64::new(h, 0.0);
    b[(trail[1], 0)] = C64::new(0.0, h);
    for j in 1..k {
        b[(lead[j], j)] = C64::new(h, 0.0);
        b[(trail[j + 1], j)] = C64::new(0.0, h);
    }
    let mut rng = seeded(seed);
    let mix = &random_matrix(&mut rng, k, k) + &Matrix::identity(k);
    b.matmul(&mix)
}

/// Identity-coordinate image of a plane, as the transporter sees it.
fn identity_normal_form(q: &SymmetricForm, p: &Plane) -> Option<NormalizedPlane> {
    let to_identity = transpose_factor(q).unwrap().p;
    let lambda = Plane::new(to_identity.matmul(p.basis()), &tol()).ok()?;
    normalize_plane(&lambda, &tol()).ok()
}

fn adversarial(m: usize, k: usize, seed: u64, identity: bool) -> Case {
    let q = if identity {
        SymmetricForm::identity(m, tol())
    } else {
        random_form(m, seed)
    };
    let p1 = sample_isotropic(&q, k, seed).unwrap();
    let np = identity_normal_form(&q, &p1).expect("sampled plane normalizes");
    let p2 = pull_back(&q, &singular_block_plane(np.order(), m, k, seed + 1));
    Case {
        label: "adversarial",
        q,
        p1,
        p2,
    }
}

/// `det` by cofactor expansion over all minors.
fn exact_det(a: &Matrix) -> C64 {
    let n = a.rows();
    if n == 0 {
        return C64::new(1.0, 0.0);
    }
    let mut total = C64::new(0.0, 0.0);
    for j in 0..n {
        let rows: Vec<usize> = (1..n).collect();
        let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
        let minor = a.select_rows(&rows).select_cols(&cols);
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        total += a[(0, j)] * exact_det(&minor) * sign;
    }
    total
}

/// Every isotropic coordinate plane of the identity form spanned by columns
/// `(e_a ± i·e_b)/√2` over disjoint pairs, for small `m` and `k`.
fn coordinate_planes(m: usize, k: usize) -> Vec<Matrix> {
    fn pairings(
        free: &[usize],
        k: usize,
        acc: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if acc.len() == k {
            out.push(acc.clone());
            return;
        }
        for (x, &a) in free.iter().enumerate() {
            for &b in &free[x + 1..] {
                if acc.last().is_some_and(|&(pa, _)| pa >= a) {
                    continue;
                }
                acc.push((a, b));
                let rest: Vec<usize> = free.iter().copied().filter(|&c| c != a && c != b).collect();
                pairings(&rest, k, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    pairings(&(0..m).collect::<Vec<_>>(), k, &mut Vec::new(), &mut out);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut planes = Vec::new();
    for pairs in out {
        for signs in 0..(1u32 << k) {
            let mut b = Matrix::zeros(m, k);
            for (j, &(a, c)) in pairs.iter().enumerate() {
                let s = if signs >> j & 1 == 1 { -h } else { h };
                b[(a, j)] = C64::new(h, 0.0);
                b[(c, j)] = C64::new(0.0, s);
            }
            planes.push(b);
        }
    }
    planes
}

/// Brute force over coordinate-plane pairs: counts pairs with singular `M₁`
/// under the first plane's permutation and pairs with `det X = 0`.
struct BruteForce {
    cases: Vec<Case>,
    singular_m1: usize,
    singular_x: usize,
    generic: usize,
}

fn brute_force(budget: usize) -> BruteForce {
    let mut found = BruteForce {
        cases: Vec::new(),
        singular_m1: 0,
        singular_x: 0,
        generic: 0,
    };
    let mut rng = seeded(4242);
    for (m, k) in [(3, 1), (4, 1), (5, 1), (5, 2), (6, 2), (7, 2)] {
        let planes = coordinate_planes(m, k);
        let mixed: Vec<Matrix> = planes
            .iter()
            .map(|b| b.matmul(&(&random_matrix(&mut rng, k, k) + &Matrix::identity(k))))
            .collect();
        for (x, b1) in mixed.iter().enumerate() {
            for b2 in &mixed[x..] {
                let p1 = Plane::new(b1.clone(), &tol()).unwrap();
                let p2 = Plane::new(b2.clone(), &tol()).unwrap();
                let np1 = normalize_plane(&p1, &tol()).unwrap();
                let singular = match normalize_with_permutation(&p2, &np1, &tol()) {
                    Err(_) => {
                        found.singular_m1 += 1;
                        true
                    }
                    Ok(np2) => {
                        if let Ok((_, w)) = transport_generic(&np1, &np2, &tol()) {
                            found.generic += 1;
                            if exact_det(&w.x).norm() <= 1e-12 {
                                found.singular_x += 1;
                            }
                        } else {
                            found.singular_x += 1;
                        }
                        false
                    }
                };
                if singular && found.cases.len() < budget {
                    found.cases.push(Case {
                        label: "brute-force",
                        q: SymmetricForm::identity(m, tol()),
                        p1,
                        p2,
                    });
                }
            }
        }
    }
    found
}

fn complete_cases() -> (Vec<Case>, BruteForce) {
    let mut cases = Vec::new();
    let mut rng = seeded(31_337);
    // k = m/2, alternating identity and random forms.
    for t in 0..40u64 {
        let m = 2 * (1 + t as usize % 5);
        let q = if t % 2 == 0 {
            SymmetricForm::identity(m, tol())
        } else {
            random_form(m, 5_000 + t)
        };
        let p1 = sample_isotropic(&q, m / 2, 6_000 + t).unwrap();
        let p2 = sample_isotropic(&q, m / 2, 7_000 + t).unwrap();
        cases.push(Case {
            label: "half-dimensional",
            q,
            p1,
            p2,
        });
    }
    // Random non-identity forms, any admissible k.
    for t in 0..60u64 {
        let m = rng.gen_range(2..=10usize);
        let k = rng.gen_range(1..=m / 2);
        let q = random_form(m, 8_000 + t);
        let p1 = sample_isotropic(&q, k, 9_000 + t).unwrap();
        let p2 = sample_isotropic(&q, k, 10_000 + t).unwrap();
        cases.push(Case {
            label: "general form",
            q,
            p1,
            p2,
        });
    }
    // Planted singular M₁ under the first plane's permutation.
    for t in 0..60u64 {
        let m = rng.gen_range(3..=10usize);
        let k = rng.gen_range(1..=(m - 1) / 2);
        cases.push(adversarial(m, k, 11_000 + t, t % 2 == 0));
    }
    // Singular blocks found by enumeration, topped up with random pairs.
    let mut brute = brute_force(40);
    let short = 40 - brute.cases.len();
    cases.append(&mut brute.cases);
    for t in 0..short as u64 {
        let m = rng.gen_range(2..=12usize);
        let k = rng.gen_range(1..=m / 2);
        let q = SymmetricForm::identity(m, tol());
        let p1 = sample_isotropic(&q, k, 12_000 + t).unwrap();
        let p2 = sample_isotropic(&q, k, 13_000 + t).unwrap();
        cases.push(Case {
            label: "identity form",
            q,
            p1,
            p2,
        });
    }
    (cases, brute)
}

/// Independent check of a transporter: group membership and span transport
/// recomputed from the raw matrices.
fn independent_residuals(case: &Case, a: &Matrix) -> Result<(f64, f64), String> {
    let group = group_membership(&case.q, a).map_err(|e| e.to_string())?;
    let span = span_distance(&a.matmul(case.p1.basis()), case.p2.basis(), &tol())
        .map_err(|e| e.to_string())?;
    Ok((group, span))
}

fn complete_transporter(cases: &[Case], brute: &BruteForce) -> Outcome {
    let start = Instant::now();
    let mut worst = (0.0f64, 0.0f64);
    let mut not_generic = 0;
    for (t, case) in cases.iter().enumerate() {
        let map = transport(&case.q, &case.p1, &case.p2, Strategy::Auto)
            .map_err(|e| format!("case {t} ({}): {e}", case.label))?;
        let (group, span) = independent_residuals(case, &map.a)?;
        worst = (worst.0.max(group), worst.1.max(span));
        ensure(group <= RESIDUAL && span <= RESIDUAL, || {
            format!(
                "case {t} ({}): group {group:.2e}, span {span:.2e}",
                case.label
            )
        })?;
        if matches!(
            transport(&case.q, &case.p1, &case.p2, Strategy::GenericOnly),
            Err(Error::NotGeneric(_))
        ) {
            not_generic += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(cases.len() == 200, || format!("only {} cases", cases.len()))?;
    ensure(elapsed < Duration::from_secs(10), || {
        format!("runtime {elapsed:?} >= 10 s")
    })?;
    Ok(format!(
        "200 pairs ({not_generic} not generic), worst group {:.2e}, span {:.2e}, {:.2} s; \
         enumeration: {} singular M1, {} generic with det X = 0 of {}",
        worst.0,
        worst.1,
        elapsed.as_secs_f64(),
        brute.singular_m1,
        brute.singular_x,
        brute.generic
    ))
}

fn differential(cases: &[Case]) -> Outcome {
    let mut both = 0;
    let mut distinct = 0;
    for (t, case) in cases.iter().enumerate() {
        let (Ok(g), Ok(f)) = (
            transport(&case.q, &case.p1, &case.p2, Strategy::GenericOnly),
            transport(&case.q, &case.p1, &case.p2, Strategy::FrameOnly),
        ) else {
            continue;
        };
        for (name, a) in [("generic", &g.a), ("frame", &f.a)] {
            let (group, span) = independent_residuals(case, a)?;
            ensure(group <= RESIDUAL && span <= RESIDUAL, || {
                format!("case {t}: {name} map group {group:.2e}, span {span:.2e}")
            })?;
        }
        // The maps differ by an element of the stabilizer of Λ.
        let stab =
            g.a.matmul(&inverse(&f.a, &tol()).map_err(|e| e.to_string())?);
        let fixed = span_distance(&stab.matmul(case.p2.basis()), case.p2.basis(), &tol())
            .map_err(|e| e.to_string())?;
        ensure(fixed <= RESIDUAL, || {
            format!("case {t}: A_g·A_f⁻¹ moves Λ′ by {fixed:.2e}")
        })?;
        if (&g.a - &f.a).norm_max() > 1e-6 {
            distinct += 1;
        }
        both += 1;
    }
    ensure(both > 0, || {
        "no pair succeeded under both strategies".into()
    })?;
    Ok(format!(
        "{both} pairs certified under both strategies, {distinct} with distinct maps"
    ))
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_isotrans"))
        .current_dir(dir)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.code() != Some(0) {
        return Err(format!(
            "`isotrans {}` exited with {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn cli_session(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let q = random_symmetric_of_rank(&mut seeded(2_024), 6, 6);
    let degenerate = random_symmetric_of_rank(&mut seeded(2_025), 5, 3);
    write_matrix(dir.join("q.json"), &q).map_err(|e| e.to_string())?;
    write_matrix(dir.join("q_low.json"), &degenerate).map_err(|e| e.to_string())?;

    let steps: &[&[&str]] = &[
        &["factor", "q.json", "--out", "p.json"],
        &["verify", "factor", "q.json", "p.json"],
        &["factor", "q_low.json", "--out", "p_low.json"],
        &["verify", "factor", "q_low.json", "p_low.json"],
        &["reduce", "q.json", "--out", "r.json"],
        &["verify", "reduce", "q.json", "r.json"],
        &[
            "sample", "q.json", "--k", "2", "--seed", "3", "--out", "l1.json",
        ],
        &[
            "sample", "q.json", "--k", "2", "--seed", "4", "--out", "l2.json",
        ],
        &[
            "sample", "q.json", "--k", "3", "--seed", "5", "--out", "h1.json",
        ],
        &[
            "sample", "q.json", "--k", "3", "--seed", "6", "--out", "h2.json",
        ],
        &[
            "sample", "--m", "7", "--k", "3", "--seed", "9", "--out", "id.json",
        ],
        &["verify", "sample", "l1.json", "q.json"],
        &["verify", "sample", "l2.json", "q.json"],
        &["verify", "sample", "id.json"],
        &[
            "transport",
            "q.json",
            "l1.json",
            "l2.json",
            "--out",
            "auto.json",
        ],
        &[
            "verify",
            "transport",
            "q.json",
            "l1.json",
            "l2.json",
            "auto.json",
        ],
        &[
            "transport",
            "q.json",
            "l1.json",
            "l2.json",
            "--strategy",
            "generic",
            "--out",
            "gen.json",
        ],
        &[
            "verify",
            "transport",
            "q.json",
            "l1.json",
            "l2.json",
            "gen.json",
        ],
        &[
            "transport",
            "q.json",
            "l1.json",
            "l2.json",
            "--strategy",
            "frame",
            "--out",
            "frame.json",
        ],
        &[
            "verify",
            "transport",
            "q.json",
            "l1.json",
            "l2.json",
            "frame.json",
        ],
        &[
            "transport",
            "q.json",
            "h1.json",
            "h2.json",
            "--out",
            "half.json",
        ],
        &[
            "verify",
            "transport",
            "q.json",
            "h1.json",
            "h2.json",
            "half.json",
        ],
    ];
    for step in steps {
        run_cli(dir, step)?;
    }
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .map(|entry| {
            let path = entry.unwrap().path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            (name, std::fs::read(&path).unwrap())
        })
        .collect();
    files.sort();
    Ok(files)
}

fn cli_round_trip() -> Outcome {
    let first = tempfile::tempdir().map_err(|e| e.to_string())?;
    let second = tempfile::tempdir().map_err(|e| e.to_string())?;
    let a = cli_session(first.path())?;
    let b = cli_session(second.path())?;
    ensure(a.len() == b.len(), || {
        "sessions produced different file sets".into()
    })?;
    for ((name_a, bytes_a), (name_b, bytes_b)) in a.iter().zip(&b) {
        ensure(name_a == name_b && bytes_a == bytes_b, || {
            format!("{name_a} differs between runs")
        })?;
    }
    Ok(format!(
        "{} artifacts verified, byte-identical across two runs",
        a.len()
    ))
}

fn main() {
    let (cases, brute) = complete_cases();
    let criteria: Vec<Criterion> = vec![
        ("factorization sweep", Box::new(factorization_sweep)),
        ("reduction certificate", Box::new(reduction_certificate)),
        ("isotropy bound", Box::new(isotropy_bound)),
        ("consistency identity", Box::new(consistency)),
        ("generic transporter", Box::new(generic_transporter)),
        (
            "complete transporter",
            Box::new(|| complete_transporter(&cases, &brute)),
        ),
        ("differential oracle", Box::new(|| differential(&cases))),
        ("cli round-trip", Box::new(cli_round_trip)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL {}. {name}: {reason}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
