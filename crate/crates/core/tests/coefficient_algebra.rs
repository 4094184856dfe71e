use ballspec::modes::indices_below;
use ballspec::solve::{apply_operator, residual_check};
use ballspec::spectral::ClassC;
use ballspec::{
    apply_power, class_report, enumerate, resolvent_curl, resolvent_graddiv, scale_norm,
    solve_poly, solve_problem1, solve_problem2, solve_problem3, Cutoff, Error, Family, ModeIndex,
    Operator, Problem, ScaleOrder, SpectralField,
};
use proptest::prelude::*;

fn pool() -> Vec<ModeIndex> {
    enumerate(&Family::ALL, Cutoff::First(60), 1.0)
        .unwrap()
        .into_iter()
        .map(|m| m.index)
        .collect()
}

fn field_from(pairs: &[(usize, f64)], keep: impl Fn(Family) -> bool) -> SpectralField {
    let p = pool();
    SpectralField::from_pairs(1.0, pairs.iter().map(|&(i, c)| (p[i % p.len()], c))).restrict(keep)
}

fn coefs() -> impl Strategy<Value = Vec<(usize, f64)>> {
    prop::collection::vec((0usize..60, -3.0f64..3.0), 1..30)
}

fn rel_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    a.sub(b).unwrap().norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

fn nonzero_power() -> impl Strategy<Value = i32> {
    prop_oneof![-3i32..=-1, 1i32..=3]
}

proptest! {
    #[test]
    fn powers_compose(c in coefs(), p in nonzero_power(), q in nonzero_power(), curl in any::<bool>()) {
        prop_assume!(p + q != 0);
        let op = if curl { Operator::Curl } else { Operator::GradDiv };
        let u = field_from(&c, |_| true);
        let two = apply_power(&apply_power(&u, op, p).unwrap(), op, q).unwrap();
        let one = apply_power(&u, op, p + q).unwrap();
        prop_assert!(rel_diff(&two, &one) < 1e-14);
    }

    #[test]
    fn poly_solution_norm_identity(c in coefs(), m in 1i32..=2) {
        let rhs = field_from(&c, Family::is_curl);
        prop_assume!(!rhs.is_empty());
        let u = solve_poly(&rhs, Operator::Curl, m).unwrap();
        let back = apply_power(&u, Operator::Curl, 2 * m).unwrap();
        prop_assert!(rel_diff(&back, &rhs) < 1e-13);
        let a = scale_norm(&u, ScaleOrder::w(m));
        let b = scale_norm(&rhs, ScaleOrder::w(-m));
        prop_assert!((a - b).abs() <= 1e-12 * a.max(b));
    }

    #[test]
    fn inverse_graddiv_maps_down_one_step(c in coefs(), k in 1i32..=3) {
        // ‖𝒩_d⁻¹f‖²_{A^{2k}} ≤ c_k²‖f‖²_{A^{2(k−1)}}, c_k² = max_j (1 + ν_j^{−2k})
        let f = field_from(&c, |fam| fam == Family::GradDiv);
        prop_assume!(!f.is_empty());
        let u = apply_power(&f, Operator::GradDiv, -1).unwrap();
        let ck2 = f
            .iter()
            .map(|(i, _)| 1.0 + i.wavenumber(1.0).unwrap().powi(-2 * k))
            .fold(0.0, f64::max);
        let lhs = scale_norm(&u, ScaleOrder::a(2 * k).unwrap()).powi(2);
        let rhs = ck2 * scale_norm(&f, ScaleOrder::a(2 * (k - 1)).unwrap()).powi(2);
        prop_assert!(lhs <= rhs * (1.0 + 1e-14));
    }

    #[test]
    fn resolvent_commutes_with_powers(c in coefs(), p in nonzero_power(), lam in 0.1f64..20.0) {
        let f = field_from(&c, Family::is_curl);
        prop_assume!(!f.is_empty());
        let a = resolvent_curl(&apply_power(&f, Operator::Curl, p).unwrap(), lam, None);
        let b = resolvent_curl(&f, lam, None);
        if let (Ok(a), Ok(b)) = (a, b) {
            let b = apply_power(&b.solution, Operator::Curl, p).unwrap();
            prop_assert!(rel_diff(&a.solution, &b) < 1e-13);
        }
    }

    #[test]
    fn problems_invert_in_coefficients(c in coefs(), lam in prop_oneof![-15.0f64..-0.2, 0.2f64..15.0], id in 1u8..=3) {
        let f = field_from(&c, |_| true);
        let problem = Problem::from_id(id).unwrap();
        let solved = match problem {
            Problem::One => solve_problem1(&f, lam, None),
            Problem::Two => solve_problem2(&f, lam, None),
            Problem::Three => solve_problem3(&f, lam, None),
        };
        if let Ok(r) = solved {
            let back = apply_operator(&r.solution, problem, lam);
            prop_assert!(back.sub(&f).unwrap().norm() <= 1e-13 * f.norm().max(1.0));
        }
    }

    #[test]
    fn fredholm_alternative_at_exact_eigenvalues(c in coefs(), j in 0usize..60) {
        let f = field_from(&c, Family::is_curl);
        let p = pool();
        let target = p[j];
        prop_assume!(target.is_curl());
        // −eigenvalue puts λ on the spectrum of −S
        let lam = -target.eigenvalue(1.0).unwrap();
        let resonant: Vec<ModeIndex> = f
            .iter()
            .filter(|(i, c)| **c != 0.0 && i.eigenvalue(1.0).unwrap() == -lam)
            .map(|(i, _)| *i)
            .collect();
        match resolvent_curl(&f, lam, None) {
            Ok(r) => {
                prop_assert!(resonant.is_empty());
                prop_assert!(r.resonant && r.kernel_basis.len() == 2 * target.n + 1);
            }
            Err(Error::NotSolvable(r)) => {
                prop_assert!(!resonant.is_empty());
                prop_assert_eq!(r.violated_conditions, resonant);
                prop_assert!(r.solution.is_empty());
            }
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }
}

fn idx(s: &str) -> ModeIndex {
    s.parse().unwrap()
}

#[test]
fn spectrum_accumulates_only_at_zero() {
    for fam in [Family::CurlPlus, Family::GradDiv] {
        let inv: Vec<f64> = indices_below(&[fam], 60.0, 1.0)
            .unwrap()
            .iter()
            .map(|(_, w)| 1.0 / w)
            .collect();
        assert!(inv.windows(2).all(|w| w[1] <= w[0]));
        assert!(*inv.last().unwrap() < 0.1 * inv[0]);
    }
}

#[test]
fn graddiv_inverse_at_zero_shift() {
    let j = idx("1,1,0,g");
    let nu2 = j.wavenumber(1.0).unwrap().powi(2);
    let r = resolvent_graddiv(&SpectralField::single(j, 2.0, 1.0), 0.0, None).unwrap();
    assert!((r.solution.get(&j) + 2.0 / nu2).abs() < 1e-15);
}

#[test]
fn problem_two_unit_divisor_and_potential_free_part() {
    let j = idx("2,1,1,g");
    let lam = j.wavenumber(1.0).unwrap().powi(2) + 1.0;
    let r = solve_problem2(&SpectralField::single(j, 0.7, 1.0), lam, None).unwrap();
    assert!((r.solution.get(&j) - 0.7).abs() < 1e-14);
    let v = idx("1,1,0,-");
    let r = solve_problem2(&SpectralField::single(v, 3.0, 1.0), 1.5, None).unwrap();
    assert_eq!(r.solution.get(&v), 2.0);
}

#[test]
fn problem_three_uses_both_resolvents() {
    let (a, b) = (idx("1,1,0,+"), idx("0,1,0,g"));
    let f = SpectralField::from_pairs(1.0, [(a, 1.0), (b, 1.0)]);
    let r = solve_problem3(&f, 1.0, None).unwrap();
    let lj = a.eigenvalue(1.0).unwrap();
    let nu = b.wavenumber(1.0).unwrap();
    assert!((r.solution.get(&a) - 1.0 / (1.0 + lj)).abs() < 1e-15);
    assert!((r.solution.get(&b) - 1.0 / (1.0 - nu * nu)).abs() < 1e-15);
    let z = solve_problem3(&SpectralField::new(1.0), 2.0, None).unwrap();
    assert!(z.solution.iter().all(|(_, c)| *c == 0.0));
}

#[test]
fn problem_one_needs_nonzero_shift_with_potential_part() {
    let f = SpectralField::single(idx("1,1,0,g"), 1.0, 1.0);
    assert!(solve_problem1(&f, 0.0, None).is_err());
}

#[test]
fn perturbed_solution_residual_has_predicted_size() {
    let j = idx("1,1,1,+");
    let f = SpectralField::single(j, 1.0, 1.0);
    let lam = 1.0;
    let mut u = solve_problem1(&f, lam, None).unwrap().solution;
    let cj = u.get(&j);
    u.set(j, 1.1 * cj);
    let chk = residual_check(&u, &f, lam, Problem::One, 10, 3).unwrap();
    let lj = j.eigenvalue(1.0).unwrap();
    let want = (0.1 * (lam + lj) * cj).abs();
    assert!(
        (chk.coef_residual - want).abs() < 1e-14,
        "{} vs {want}",
        chk.coef_residual
    );
    assert!(chk.fd_residual > 0.05);
}

#[test]
fn decaying_coefficients_have_shrinking_tail() {
    let m = 1;
    let modes = |count| enumerate(&[Family::CurlPlus], Cutoff::First(count), 1.0).unwrap();
    let build = |count| {
        SpectralField::from_pairs(
            1.0,
            modes(count)
                .into_iter()
                .map(|q| (q.index, q.wavenumber.powi(-(m + 2)))),
        )
    };
    let c = ClassC { k: 0, m };
    let small = class_report(&build(100), c).unwrap();
    let mid = class_report(&build(400), c).unwrap();
    let big = class_report(&build(1600), c).unwrap();
    assert!(big.w_tail_ratio < mid.w_tail_ratio && mid.w_tail_ratio < small.w_tail_ratio);
    // partial sums of a convergent series: increments shrink
    assert!(big.w_norm - mid.w_norm < mid.w_norm - small.w_norm);

    let white =
        |count| SpectralField::from_pairs(1.0, modes(count).into_iter().map(|q| (q.index, 1.0)));
    let a = class_report(&white(100), c).unwrap();
    let b = class_report(&white(800), c).unwrap();
    assert!(b.w_norm > 2.0 * a.w_norm);
    assert!(!b.note.is_empty());
}

#[test]
fn order_zero_is_euclidean() {
    let f = SpectralField::from_pairs(
        1.0,
        [
            (idx("1,1,0,+"), 3.0),
            (idx("1,1,1,-"), 4.0),
            (idx("0,1,0,g"), 12.0),
        ],
    );
    assert!((scale_norm(&f, ScaleOrder::w(0)) - 5.0).abs() < 1e-15);
    assert!((scale_norm(&f, ScaleOrder::a(0).unwrap()) - 12.0).abs() < 1e-15);
    assert!(ScaleOrder::a(3).is_err());
}
